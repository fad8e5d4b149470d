//! The dialog engine is not tied to trip planning. This builds a small
//! next-bus lookup task with its own prompts and runs it by hand.

use std::sync::Arc;

use getgoing_core::delivery::{plain_text, DeliveryMode, PromptBank};
use getgoing_core::dialog::{
    Action, AgentNode, DialogEngine, EngineOutput, Fill, Payload, TaskTree,
};
use getgoing_core::nlu::SlotKey;
use getgoing_core::trip::render_output;

const PROMPTS: &str = r#"{
  "hello": {"variants": ["This is the next-bus line."]},
  "ask_stop": {"variants": ["Which stop are you at?"]},
  "ask_stop.clarify": {"variants": ["Sorry, which stop?"]},
  "ask_stop.help": {"variants": ["Say a stop name, like Fifth and Bellefield."]},
  "said_stop": {"variants": ["You are at {dloc}."]},
  "next_bus": {
    "prefixes": ["Here is your bus."],
    "variants": ["The next bus is the {line} at {time}."]
  },
  "bye": {"variants": ["Goodbye."]}
}"#;

fn tree() -> TaskTree {
    use SlotKey::*;
    TaskTree::new(AgentNode::dialog(
        "next_bus_line",
        [Yes, No, Repeat, Restart],
        vec![
            AgentNode::inform("hello", "hello"),
            AgentNode::dialog(
                "stop",
                [Dloc],
                vec![
                    AgentNode::request("ask_stop", &[Dloc], "ask_stop"),
                    AgentNode::confirm("said_stop", Dloc, "said_stop"),
                ],
            ),
            AgentNode::execute("lookup", "lookup_departures", &[Dloc]),
            AgentNode::inform("answer", "next_bus"),
            AgentNode::inform("bye", "bye"),
        ],
    ))
    .expect("tree is well formed")
}

/// Run executors until the engine waits for the user.
fn settle(engine: &mut DialogEngine, mut out: EngineOutput) -> EngineOutput {
    while let Some(Action::CallExecutor { node_id, .. }) = out.actions.last().cloned() {
        out.actions.pop();
        let payload = Payload::new()
            .set("line", "71A")
            .set("time", "4:52 pm")
            .emphasize("71A")
            .emphasize("4:52 pm");
        engine.set_payload("answer", payload).unwrap();
        engine.complete_execute(&node_id).unwrap();
        out.extend(engine.advance());
    }
    out
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let bank = PromptBank::from_json(PROMPTS)?;
    let mut engine = DialogEngine::new(Arc::new(tree()));
    let show = |out: &EngineOutput| -> Result<(), Box<dyn std::error::Error>> {
        for mode in [DeliveryMode::SD, DeliveryMode::SeTD] {
            let docs = render_output(&bank, out, &Default::default(), mode, 0)?;
            let text: Vec<String> = docs.iter().map(plain_text).collect();
            println!("  {mode:>4}: {}", text.join(" "));
        }
        Ok(())
    };

    let out = engine.advance();
    show(&out)?;
    let turns = [
        vec![],
        vec![Fill::raw(SlotKey::Dloc, "Fifth and Bellefield")],
    ];
    for fills in turns {
        println!("user: {fills:?}");
        let out = engine.handle_turn(fills);
        let out = settle(&mut engine, out);
        show(&out)?;
    }
    println!("ended: {}", engine.ended());
    Ok(())
}
