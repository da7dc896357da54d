//! Machine-readable one-line solve reports.

use std::fmt;

use crate::engines::EngineId;

/// Terminal outcome of an engine run, also the process exit class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    LocalExtremum,
    NotConverged,
    Unreachable,
}

impl Status {
    pub fn word(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::LocalExtremum => "local_extremum",
            Status::NotConverged => "not_converged",
            Status::Unreachable => "unreachable",
        }
    }

    pub fn exit_code(self) -> u8 {
        match self {
            Status::Ok => 0,
            Status::Unreachable => 2,
            Status::NotConverged => 3,
            Status::LocalExtremum => 4,
        }
    }
}

/// One engine run against one maze.
///
/// `optimal` holds exactly when the run succeeded and matched the reference
/// length. The line format is schema-versioned and stable:
/// `v1 engine=<id> len=<n> oracle=<n> optimal=<bool> iters=<n> resid=<float>
/// ms=<float> status=<word>`.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub engine: EngineId,
    pub path_len: usize,
    pub oracle_len: usize,
    pub iterations: usize,
    pub residual: f64,
    pub wall_ms: f64,
    pub status: Status,
}

impl SolveReport {
    pub fn optimal(&self) -> bool {
        self.status == Status::Ok && self.path_len == self.oracle_len
    }

    /// The report line with the timing field zeroed, for byte comparisons.
    pub fn line_without_timing(&self) -> String {
        let mut clone = self.clone();
        clone.wall_ms = 0.0;
        clone.to_string()
    }
}

impl fmt::Display for SolveReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "v1 engine={} len={} oracle={} optimal={} iters={} resid={} ms={:.3} status={}",
            self.engine.name(),
            self.path_len,
            self.oracle_len,
            self.optimal(),
            self.iterations,
            self.residual,
            self.wall_ms,
            self.status.word()
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_line_is_stable() {
        let report = SolveReport {
            engine: EngineId::Lee,
            path_len: 12,
            oracle_len: 12,
            iterations: 0,
            residual: 0.0,
            wall_ms: 1.25,
            status: Status::Ok,
        };
        assert_eq!(
            report.to_string(),
            "v1 engine=lee len=12 oracle=12 optimal=true iters=0 resid=0 ms=1.250 status=ok"
        );
        assert_eq!(
            report.line_without_timing(),
            "v1 engine=lee len=12 oracle=12 optimal=true iters=0 resid=0 ms=0.000 status=ok"
        );
    }

    #[test]
    fn suboptimal_and_failed_runs_are_not_optimal() {
        let mut report = SolveReport {
            engine: EngineId::Physarum,
            path_len: 14,
            oracle_len: 12,
            iterations: 100,
            residual: 1e-9,
            wall_ms: 0.0,
            status: Status::Ok,
        };
        assert!(!report.optimal());
        report.path_len = 12;
        report.status = Status::LocalExtremum;
        assert!(!report.optimal());
    }
}
