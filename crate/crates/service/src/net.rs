//! Network front ends: WebSocket at `/ws`, static chat assets at `/ui`, and
//! newline-delimited JSON over plain TCP.

use std::io;
use std::path::PathBuf;
use std::sync::Arc;

use axum::extract::ws::{Message, WebSocket, WebSocketUpgrade};
use axum::extract::State;
use axum::response::Response;
use axum::routing::get;
use axum::Router;
use futures::{SinkExt, StreamExt};
use tokio::io::{AsyncBufReadExt, AsyncWriteExt, BufReader};
use tokio::net::{TcpListener, TcpStream};
use tower_http::services::ServeDir;

use crate::stream::{connect, Service};
use crate::wire::WireMessage;

pub fn router(service: Arc<Service>, ui_dir: Option<PathBuf>) -> Router {
    let router = Router::new().route("/ws", get(upgrade)).with_state(service);
    match ui_dir {
        Some(dir) => router.nest_service("/ui", ServeDir::new(dir)),
        None => router,
    }
}

async fn upgrade(ws: WebSocketUpgrade, State(service): State<Arc<Service>>) -> Response {
    ws.on_upgrade(move |socket| websocket_session(socket, service))
}

async fn websocket_session(socket: WebSocket, service: Arc<Service>) {
    let (mut sink, mut source) = socket.split();
    let conn = connect(service);
    let (tx, mut rx) = (conn.tx, conn.rx);
    let writer = tokio::spawn(async move {
        while let Some(msg) = rx.recv().await {
            if sink
                .send(Message::Text(msg.to_json().into()))
                .await
                .is_err()
            {
                break;
            }
        }
        let _ = sink.close().await;
    });
    while let Some(Ok(frame)) = source.next().await {
        let parsed = match frame {
            Message::Text(text) => WireMessage::parse_client(text.as_str()),
            Message::Close(_) => break,
            _ => continue,
        };
        if tx.send(parsed).await.is_err() {
            break;
        }
    }
    drop(tx);
    let _ = writer.await;
}

/// Accept newline-delimited JSON connections until the listener fails.
pub async fn serve_tcp(listener: TcpListener, service: Arc<Service>) -> io::Result<()> {
    loop {
        let (stream, peer) = listener.accept().await?;
        tracing::debug!(%peer, "tcp client");
        tokio::spawn(tcp_session(stream, service.clone()));
    }
}

async fn tcp_session(stream: TcpStream, service: Arc<Service>) {
    let (read, mut write) = stream.into_split();
    let conn = connect(service);
    let (tx, mut rx) = (conn.tx, conn.rx);
    let writer = tokio::spawn(async move {
        while let Some(msg) = rx.recv().await {
            let mut line = msg.to_json();
            line.push('\n');
            if write.write_all(line.as_bytes()).await.is_err() {
                break;
            }
        }
        let _ = write.shutdown().await;
    });
    let mut lines = BufReader::new(read).lines();
    while let Ok(Some(line)) = lines.next_line().await {
        if line.trim().is_empty() {
            continue;
        }
        if tx.send(WireMessage::parse_client(&line)).await.is_err() {
            break;
        }
    }
    drop(tx);
    let _ = writer.await;
}

/// Run the HTTP and TCP front ends until either stops.
pub async fn serve(
    service: Arc<Service>,
    http: TcpListener,
    tcp: Option<TcpListener>,
    ui_dir: Option<PathBuf>,
) -> io::Result<()> {
    let app = router(service.clone(), ui_dir);
    let http = async move { axum::serve(http, app).await };
    match tcp {
        Some(tcp) => tokio::select! {
            r = http => r,
            r = serve_tcp(tcp, service) => r,
        },
        None => http.await,
    }
}
