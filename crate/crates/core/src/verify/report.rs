use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
}

impl Status {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
        }
    }
}

/// One line of the verification report. `Display` renders a TOML table so
/// a sequence of reports forms an array of `[[check]]` tables.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckReport {
    pub name: String,
    pub status: Status,
    pub measured: f64,
    pub threshold: f64,
    pub detail: String,
}

impl CheckReport {
    pub fn new(
        name: &str,
        passed: bool,
        measured: f64,
        threshold: f64,
        detail: impl Into<String>,
    ) -> Self {
        Self {
            name: name.to_string(),
            status: Status::from_bool(passed),
            measured,
            threshold,
            detail: detail.into(),
        }
    }

    /// Report for a check that could not be carried out.
    pub fn errored(name: &str, err: impl fmt::Display) -> Self {
        Self::new(name, false, f64::NAN, f64::NAN, format!("error: {err}"))
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

fn toml_float(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:e}")
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[[check]]")?;
        writeln!(f, "name = {:?}", self.name)?;
        writeln!(f, "status = {:?}", self.status.as_str())?;
        writeln!(f, "measured = {}", toml_float(self.measured))?;
        writeln!(f, "threshold = {}", toml_float(self.threshold))?;
        writeln!(f, "detail = {:?}", self.detail)
    }
}
