//! Terminal chat client. Chunks print as they arrive; a line typed while
//! the system is still talking interrupts it.

use std::io::{self, Write};

use tokio::io::{AsyncBufReadExt, AsyncWriteExt, BufReader};
use tokio::net::TcpStream;
use tokio::sync::mpsc;

use crate::stream::{Connection, Inbound};
use crate::wire::WireMessage;

/// Bridge a newline-delimited JSON TCP connection onto channels.
pub async fn connect_tcp(addr: &str) -> io::Result<Connection> {
    let stream = TcpStream::connect(addr).await?;
    let (read, mut write) = stream.into_split();
    let (in_tx, mut in_rx) = mpsc::channel::<Inbound>(64);
    let (out_tx, out_rx) = mpsc::channel(64);
    tokio::spawn(async move {
        while let Some(Ok(msg)) = in_rx.recv().await {
            let mut line = msg.to_json();
            line.push('\n');
            if write.write_all(line.as_bytes()).await.is_err() {
                break;
            }
        }
    });
    tokio::spawn(async move {
        let mut lines = BufReader::new(read).lines();
        while let Ok(Some(line)) = lines.next_line().await {
            match serde_json::from_str::<WireMessage>(&line) {
                Ok(msg) => {
                    if out_tx.send(msg).await.is_err() {
                        break;
                    }
                }
                Err(e) => tracing::warn!(error = %e, "unreadable server frame"),
            }
        }
    });
    Ok(Connection {
        tx: in_tx,
        rx: out_rx,
    })
}

fn show(text: &str) {
    let mut out = io::stdout().lock();
    let _ = out.write_all(text.as_bytes());
    let _ = out.flush();
}

/// Send `start`, then relay between the terminal and the session until the
/// dialog ends, or stdin closes and the last reply has been shown.
pub async fn run(conn: Connection, start: WireMessage) -> io::Result<()> {
    let Connection { tx, mut rx } = conn;
    let gone = || io::Error::new(io::ErrorKind::BrokenPipe, "session closed");
    tx.send(Ok(start)).await.map_err(|_| gone())?;
    let mut stdin = BufReader::new(tokio::io::stdin()).lines();
    let mut talking = false;
    // Replies not started yet: the welcome, then one per utterance.
    let mut awaiting = 1usize;
    let mut eof = false;
    loop {
        if eof && awaiting == 0 && !talking {
            return Ok(());
        }
        tokio::select! {
            msg = rx.recv() => match msg {
                Some(WireMessage::Session { session_id, mode }) => {
                    show(&format!("[session {session_id}, the {} system]\n", mode.color()));
                }
                Some(WireMessage::Chunk { seq, text, .. }) => {
                    if seq == 0 {
                        awaiting = awaiting.saturating_sub(1);
                    }
                    if !talking {
                        show("system: ");
                        talking = true;
                    }
                    show(&text);
                    show(" ");
                }
                Some(WireMessage::TurnEnd {}) => {
                    talking = false;
                    show("\n> ");
                }
                Some(WireMessage::DialogEnd {}) => {
                    show("\n[dialog over]\n");
                    return Ok(());
                }
                Some(WireMessage::Error { code, message }) => {
                    eprintln!("[{code}] {message}");
                    awaiting = awaiting.saturating_sub(1);
                }
                Some(_) => {}
                None => return Err(gone()),
            },
            line = stdin.next_line(), if !eof => {
                let Some(line) = line? else {
                    eof = true;
                    continue;
                };
                if talking {
                    tx.send(Ok(WireMessage::BargeIn {})).await.map_err(|_| gone())?;
                }
                let text = line.trim();
                if !text.is_empty() {
                    tx.send(Ok(WireMessage::Utterance { text: text.to_string() })).await.map_err(|_| gone())?;
                    awaiting += 1;
                }
            }
        }
    }
}
