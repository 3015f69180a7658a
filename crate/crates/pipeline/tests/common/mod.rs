#![allow(dead_code)]

use std::io::{BufRead, BufReader};
use std::path::Path;
use std::process::{Child, Command, Output, Stdio};

pub const BIN: &str = env!("CARGO_BIN_EXE_mattekit");

pub fn mattekit(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(BIN);
    cmd.args(args);
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("run mattekit")
}

/// Runs the CLI and panics with its stderr on failure.
pub fn mattekit_ok(args: &[&str], envs: &[(&str, &str)]) -> String {
    let out = mattekit(args, envs);
    assert!(
        out.status.success(),
        "mattekit {args:?} failed:\n{}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("utf-8 output")
}

pub struct Server {
    pub child: Child,
    pub base: String,
}

impl Server {
    pub fn spawn(manifest: &Path, extra: &[&str]) -> Server {
        let mut child = Command::new(BIN)
            .args(["serve", "--bind", "127.0.0.1:0", "--manifest"])
            .arg(manifest)
            .args(extra)
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .expect("spawn server");
        let stdout = child.stdout.take().expect("piped stdout");
        let mut line = String::new();
        BufReader::new(stdout).read_line(&mut line).expect("read banner");
        let base = line
            .trim()
            .strip_prefix("listening on ")
            .unwrap_or_else(|| panic!("unexpected banner {line:?}"))
            .to_string();
        Server { child, base }
    }

    pub fn url(&self, path: &str) -> String {
        format!("{}{path}", self.base)
    }

    /// SIGTERM, then wait for exit.
    pub fn terminate(mut self) -> std::process::ExitStatus {
        let pid = self.child.id().to_string();
        Command::new("kill").args(["-TERM", &pid]).status().expect("kill");
        let status = self.child.wait().expect("wait");
        std::mem::forget(self);
        status
    }

    pub fn kill(mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
        std::mem::forget(self);
    }
}

impl Drop for Server {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

pub fn agent() -> ureq::Agent {
    ureq::Agent::config_builder().http_status_as_error(false).build().into()
}

/// Status code and body text of a response.
pub fn get(agent: &ureq::Agent, url: &str) -> (u16, String) {
    let mut resp = agent.get(url).call().expect("request");
    let status = resp.status().as_u16();
    (status, resp.body_mut().read_to_string().expect("body"))
}

pub fn get_bytes(agent: &ureq::Agent, url: &str) -> (u16, Vec<u8>) {
    let mut resp = agent.get(url).call().expect("request");
    let status = resp.status().as_u16();
    (status, resp.body_mut().read_to_vec().expect("body"))
}

pub fn post(agent: &ureq::Agent, url: &str, body: &str) -> Result<(u16, String), ureq::Error> {
    let mut resp = agent.post(url).header("content-type", "application/json").send(body)?;
    let status = resp.status().as_u16();
    Ok((status, resp.body_mut().read_to_string()?))
}

pub fn decision(agent: &ureq::Agent, base: &str, id: &str, decision: &str) -> Result<(u16, String), ureq::Error> {
    post(agent, &format!("{base}/api/samples/{id}/decision"), &format!("{{\"decision\":\"{decision}\"}}"))
}

/// Writes `count` samples whose mattes carry attached edge noise, so the
/// automatic screen flags them all.
pub fn flagged_dataset(input: &Path, manifest: &Path, count: usize) {
    let noisy = mattekit_testkit::scale_up(&mattekit_testkit::six_by_six_noisy(), 3);
    let rgb = mattekit_core::RgbImage::from_fn(18, 18, |r, c| [r as u8 * 9, c as u8 * 9, 90]).unwrap();
    for i in 0..count {
        mattekit_testkit::write_pair(input, &format!("f{i:03}"), &rgb, &noisy);
    }
    mattekit_ok(
        &["ingest", input.to_str().unwrap(), "--manifest", manifest.to_str().unwrap()],
        &[],
    );
}
