use std::collections::VecDeque;
use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpListener;
use std::sync::{Arc, Mutex};
use std::thread;
use std::time::Duration;

use forge_core::actions::PlanOrigin;
use forge_core::controller::{RunConfig, Runner};
use forge_core::planner::{
    ChatMessage, ChatRequest, ChatTransport, HttpTransport, LlmConfig, LlmPlanner, Planner,
    PlannerContext, PlannerKind, PlannerOutput, TransportError,
};
use forge_core::routing::TaskKind;
use forge_core::synth::planted_interaction;
use forge_core::table::Schema;

type Replies = Arc<Mutex<VecDeque<Result<String, String>>>>;

/// Hands out canned replies and remembers every request.
struct Canned {
    replies: Replies,
    seen: Arc<Mutex<Vec<ChatRequest>>>,
}

impl ChatTransport for Canned {
    fn complete(&self, request: &ChatRequest) -> Result<String, TransportError> {
        self.seen.lock().unwrap().push(request.clone());
        match self.replies.lock().unwrap().pop_front() {
            Some(Ok(text)) => Ok(text),
            Some(Err(e)) => Err(TransportError(e)),
            None => Err(TransportError("no more replies".into())),
        }
    }
}

fn cfg() -> LlmConfig {
    LlmConfig::new("http://127.0.0.1:9/v1/chat/completions", "test-model")
}

fn planner(replies: Vec<Result<&str, &str>>) -> (LlmPlanner, Arc<Mutex<Vec<ChatRequest>>>) {
    let seen = Arc::new(Mutex::new(Vec::new()));
    let replies = replies
        .into_iter()
        .map(|r| r.map(str::to_owned).map_err(str::to_owned))
        .collect();
    let transport = Canned {
        replies: Arc::new(Mutex::new(replies)),
        seen: seen.clone(),
    };
    (LlmPlanner::new(cfg(), Box::new(transport), 7), seen)
}

fn ctx(remaining: usize) -> PlannerContext {
    let t = planted_interaction(60, 1).table;
    PlannerContext {
        task: TaskKind::Regression,
        schema: Schema::of(&t),
        baseline_metric: 0.1,
        best_metric: 0.1,
        history: vec![],
        iteration: 1,
        remaining_actions: remaining,
    }
}

const MUL: &str = r#"[{"op":"mul","args":{"left":"x1","right":"x2","out_name":"x1_x_x2"}}]"#;

#[test]
fn unparseable_reply_is_retried_with_the_error() {
    let (mut p, seen) = planner(vec![Ok("sure, here you go"), Ok(MUL)]);
    let PlannerOutput::Plan { plan, notes } = p.plan(&ctx(5)).unwrap() else {
        panic!("expected a plan");
    };
    assert_eq!(plan.origin, PlanOrigin::Llm);
    assert_eq!(plan.len(), 1);
    assert_eq!(notes.len(), 1);
    let seen = seen.lock().unwrap();
    assert_eq!(seen.len(), 2);
    assert_eq!(seen[1].messages.len(), 3);
    assert_eq!(seen[1].messages[1].role, "assistant");
    assert!(seen[1].messages[2].content.contains("could not be used"));
}

#[test]
fn persistent_garbage_falls_back_to_heuristic() {
    let (mut p, seen) = planner(vec![Ok("no"), Ok("[1, 2]"), Ok("{\"op\":\"mul\"}")]);
    let PlannerOutput::Plan { plan, notes } = p.plan(&ctx(5)).unwrap() else {
        panic!("expected a plan");
    };
    assert_eq!(plan.origin, PlanOrigin::Heuristic);
    assert!(notes.iter().any(|n| n == "fell back to the heuristic planner"));
    // first attempt plus two retries
    assert_eq!(seen.lock().unwrap().len(), 3);
}

#[test]
fn transport_failure_falls_back_at_once() {
    let (mut p, seen) = planner(vec![Err("connection refused")]);
    let PlannerOutput::Plan { plan, notes } = p.plan(&ctx(5)).unwrap() else {
        panic!("expected a plan");
    };
    assert_eq!(plan.origin, PlanOrigin::Heuristic);
    assert!(notes[0].contains("connection refused"));
    assert_eq!(seen.lock().unwrap().len(), 1);
}

#[test]
fn empty_array_means_exhausted() {
    let (mut p, _) = planner(vec![Ok("[]")]);
    assert!(matches!(p.plan(&ctx(5)).unwrap(), PlannerOutput::Exhausted { .. }));
}

#[test]
fn long_plans_are_cut_to_the_remaining_budget() {
    let item = r#"{"op":"square","args":{"column":"x3","out_name":"s"}}"#;
    let reply = format!("[{}]", [item; 5].join(","));
    let (mut p, _) = planner(vec![Ok(reply.as_str())]);
    let PlannerOutput::Plan { plan, notes } = p.plan(&ctx(2)).unwrap() else {
        panic!("expected a plan");
    };
    assert_eq!(plan.len(), 2);
    assert!(notes[0].contains("kept 2"), "{notes:?}");
}

#[test]
fn prompt_carries_schema_but_no_rows() {
    let (mut p, seen) = planner(vec![Ok(MUL)]);
    p.plan(&ctx(5)).unwrap();
    let seen = seen.lock().unwrap();
    let prompt = &seen[0].messages[0].content;
    assert!(prompt.contains("x1") && prompt.contains("[target]"));
    assert_eq!(seen[0].temperature, 0.0);
}

#[test]
fn runner_uses_the_injected_llm_planner() {
    let (p, _) = planner(vec![Ok(MUL), Ok("[]")]);
    let config = RunConfig {
        seed: 7,
        target: Some("y".into()),
        planner: PlannerKind::Llm(cfg()),
        ..RunConfig::default()
    };
    let out = Runner::new(config)
        .with_planner(Box::new(p))
        .run(&planted_interaction(120, 3).table)
        .unwrap();
    assert_eq!(out.log.len(), 1);
    assert!(out.log[0].accepted);
    assert_eq!(out.log[0].planner_origin, Some(PlanOrigin::Llm));
    assert!(out.report.contains("Plans by origin: llm 1."), "{}", out.report);
}

/// Serves one chat-completions request and returns the raw request text.
fn serve_once(listener: TcpListener, content: &'static str) -> thread::JoinHandle<String> {
    thread::spawn(move || {
        let (stream, _) = listener.accept().unwrap();
        let mut reader = BufReader::new(stream.try_clone().unwrap());
        let mut head = String::new();
        let mut length = 0;
        loop {
            let mut line = String::new();
            reader.read_line(&mut line).unwrap();
            if let Some(v) = line.to_ascii_lowercase().strip_prefix("content-length:") {
                length = v.trim().parse().unwrap();
            }
            head += &line;
            if line == "\r\n" {
                break;
            }
        }
        let mut body = vec![0; length];
        reader.read_exact(&mut body).unwrap();
        if head.to_ascii_lowercase().contains("transfer-encoding: chunked") {
            loop {
                let mut size = String::new();
                reader.read_line(&mut size).unwrap();
                let n = usize::from_str_radix(size.trim(), 16).unwrap();
                let mut chunk = vec![0; n + 2];
                reader.read_exact(&mut chunk).unwrap();
                if n == 0 {
                    break;
                }
                body.extend_from_slice(&chunk[..n]);
            }
        }
        let reply = serde_json::json!({"choices": [{"message": {"role": "assistant", "content": content}}]})
            .to_string();
        let mut stream = stream;
        write!(
            stream,
            "HTTP/1.1 200 OK\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{reply}",
            reply.len()
        )
        .unwrap();
        head + &String::from_utf8(body).unwrap()
    })
}

#[test]
fn http_transport_speaks_chat_completions() {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!("http://{}/v1/chat/completions", listener.local_addr().unwrap());
    let server = serve_once(listener, MUL);
    let transport = HttpTransport::new(&url, "secret-key", Duration::from_secs(5));
    let request = ChatRequest {
        model: "test-model".into(),
        temperature: 0.0,
        messages: vec![ChatMessage {
            role: "user".into(),
            content: "hello".into(),
        }],
    };
    assert_eq!(transport.complete(&request).unwrap(), MUL);
    let raw = server.join().unwrap();
    assert!(raw.starts_with("POST /v1/chat/completions"));
    assert!(raw.to_ascii_lowercase().contains("authorization: bearer secret-key"), "{raw}");
    let body = raw.split("\r\n\r\n").nth(1).unwrap();
    let body: serde_json::Value = serde_json::from_str(body).unwrap();
    assert_eq!(body["model"], "test-model");
    assert_eq!(body["messages"][0]["content"], "hello");
}

#[test]
fn unreachable_endpoint_is_a_transport_error() {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!("http://{}/v1/chat/completions", listener.local_addr().unwrap());
    drop(listener);
    let transport = HttpTransport::new(&url, "k", Duration::from_secs(2));
    let request = ChatRequest {
        model: "m".into(),
        temperature: 0.0,
        messages: vec![],
    };
    assert!(transport.complete(&request).is_err());
}
