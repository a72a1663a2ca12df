//! The standard library: `.hott` sources listed in `stdlib/manifest.txt`,
//! plus the table of declarations the library must provide.

use std::path::{Path, PathBuf};

use crate::checker::{check_source, Flags, Report, Signature};

/// Library sources compiled into the binary, in manifest order.
pub const EMBEDDED: &[(&str, &str)] = &[
    ("base.hott", include_str!("../../../stdlib/base.hott")),
    ("equiv.hott", include_str!("../../../stdlib/equiv.hott")),
    ("prop.hott", include_str!("../../../stdlib/prop.hott")),
    ("resizing.hott", include_str!("../../../stdlib/resizing.hott")),
];

pub const EMBEDDED_MANIFEST: &str = include_str!("../../../stdlib/manifest.txt");

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ManifestEntry {
    pub file: &'static str,
    pub names: &'static [&'static str],
    pub tag: &'static str,
    pub required: bool,
}

/// Declarations the library is expected to contain.
pub const ENTRIES: &[ManifestEntry] = &[
    ManifestEntry {
        file: "base.hott",
        names: &["comp"],
        tag: "composition",
        required: true,
    },
    ManifestEntry {
        file: "base.hott",
        names: &["transport"],
        tag: "transport",
        required: true,
    },
    ManifestEntry {
        file: "equiv.hott",
        names: &["LInv0", "RInv0", "isEquiv0", "Equiv0", "idEquiv", "idToEquiv"],
        tag: "equivalences",
        required: true,
    },
    ManifestEntry {
        file: "equiv.hott",
        names: &["idToEquivRefl"],
        tag: "T1",
        required: true,
    },
    ManifestEntry {
        file: "equiv.hott",
        names: &["equivInv", "equivInvLeft", "equivInvRight"],
        tag: "T2",
        required: true,
    },
    ManifestEntry {
        file: "equiv.hott",
        names: &["equivComp"],
        tag: "T3",
        required: true,
    },
    ManifestEntry {
        file: "equiv.hott",
        names: &["isUnivalent0", "univalence0"],
        tag: "univalence",
        required: true,
    },
    ManifestEntry {
        file: "prop.hott",
        names: &["isPropPi"],
        tag: "T4",
        required: true,
    },
    ManifestEntry {
        file: "prop.hott",
        names: &["isPropIsProp"],
        tag: "T5",
        required: true,
    },
    ManifestEntry {
        file: "equiv.hott",
        names: &["transportUa"],
        tag: "T6",
        required: true,
    },
    ManifestEntry {
        file: "prop.hott",
        names: &["isProp0", "Prop0", "propComparison0"],
        tag: "propositions",
        required: true,
    },
    ManifestEntry {
        file: "resizing.hott",
        names: &["resizing0"],
        tag: "resizing",
        required: true,
    },
    ManifestEntry {
        file: "equiv.hott",
        names: &["isPropIsEquiv"],
        tag: "S1",
        required: false,
    },
];

/// Parse a manifest: one path per line, `#` starts a comment.
pub fn parse_manifest(text: &str) -> Vec<String> {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(str::to_string)
        .collect()
}

/// Flags under which the library is built.
pub fn default_flags() -> Flags {
    Flags {
        resizing: true,
        ..Flags::default()
    }
}

#[derive(Clone, Debug, Default)]
pub struct Build {
    pub report: Report,
    /// Required manifest names that did not check (or are missing).
    pub missing_required: Vec<String>,
    /// Stretch names that are absent or failed.
    pub missing_stretch: Vec<String>,
}

impl Build {
    pub fn passed(&self) -> bool {
        self.report.passed() && self.missing_required.is_empty()
    }
}

fn summarize(report: Report) -> Build {
    let mut build = Build {
        report,
        ..Default::default()
    };
    for e in ENTRIES {
        for n in e.names {
            let ok = build.report.find(n).is_some_and(|d| d.passed);
            if !ok {
                let label = format!("{n} [{}]", e.tag);
                if e.required {
                    build.missing_required.push(label);
                } else {
                    build.missing_stretch.push(label);
                }
            }
        }
    }
    build
}

/// Check a list of (file name, source) pairs in order.
pub fn build_sources<'a>(
    sig: &mut Signature,
    sources: impl IntoIterator<Item = (&'a str, &'a str)>,
) -> Build {
    let mut report = Report::default();
    for (file, src) in sources {
        match check_source(sig, file, src, false) {
            Ok(r) => report.extend(r),
            Err(e) => report.frontend_errors.push(e.to_string()),
        }
    }
    summarize(report)
}

/// Build the embedded library.
pub fn build_embedded(sig: &mut Signature) -> Build {
    build_sources(sig, EMBEDDED.iter().copied())
}

#[derive(Debug, thiserror::Error)]
#[error("{path}: {source}")]
pub struct ManifestIoError {
    pub path: PathBuf,
    #[source]
    pub source: std::io::Error,
}

/// Read the files named by a manifest on disk, relative to its directory.
pub fn read_manifest(path: &Path) -> Result<Vec<(String, String)>, ManifestIoError> {
    let io = |p: &Path| {
        let p = p.to_path_buf();
        move |source| ManifestIoError { path: p, source }
    };
    let text = std::fs::read_to_string(path).map_err(io(path))?;
    let dir = path.parent().unwrap_or(Path::new("."));
    parse_manifest(&text)
        .into_iter()
        .map(|rel| {
            let p = dir.join(&rel);
            let src = std::fs::read_to_string(&p).map_err(io(&p))?;
            Ok((p.display().to_string(), src))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_matches_embedded_order() {
        let files = parse_manifest(EMBEDDED_MANIFEST);
        let embedded: Vec<&str> = EMBEDDED.iter().map(|(f, _)| *f).collect();
        assert_eq!(files, embedded);
    }

    #[test]
    fn manifest_comments_and_blanks() {
        assert_eq!(
            parse_manifest("# c\n\na.hott  # trailing\n b.hott\n"),
            vec!["a.hott", "b.hott"]
        );
    }
}
