use std::collections::BTreeSet;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hott_core::checker::Flags;
use hott_core::stdlib::default_flags;

#[derive(Parser, Debug)]
#[command(name = "hott", version, about = "Kernel, groupoid model and denotation checks")]
pub struct Cli {
    /// Report format
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    /// Seed for corpus sampling order; never affects verdicts
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Cap on the objects of user-supplied groupoids (same as HOTT_MAX_OBJECTS)
    #[arg(long, global = true)]
    pub max_objects: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Parse and typecheck source files
    Check {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[command(flatten)]
        kernel: KernelFlags,
    },
    /// Print the normal form of a definition
    Norm {
        file: PathBuf,
        #[arg(long = "def")]
        name: String,
        #[command(flatten)]
        kernel: KernelFlags,
    },
    /// Build the standard library and compare against its manifest
    Stdlib {
        /// Manifest on disk instead of the embedded library
        #[arg(long)]
        manifest: Option<PathBuf>,
        #[command(flatten)]
        kernel: KernelFlags,
    },
    /// Checks in the finite-groupoid model
    #[command(subcommand)]
    Model(ModelCommand),
    /// Interpret a checked definition in the groupoid model
    Denote {
        file: PathBuf,
        #[arg(long = "def")]
        name: String,
        /// Universe bound: codes denote sets of size at most K
        #[arg(long, default_value_t = 2)]
        k: u32,
        #[command(flatten)]
        kernel: KernelFlags,
    },
}

#[derive(Subcommand, Debug)]
pub enum ModelCommand {
    /// Tribe axiom suite
    Axioms {
        /// default, small, or a JSON exchange document
        #[arg(long, default_value = "default")]
        corpus: String,
    },
    /// Univalence of the universe of sets of size at most K
    Univalent {
        #[arg(long, default_value_t = 2)]
        k: usize,
    },
    /// Subobject classifier of the universe and its theorems
    Omega {
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// default, small, or a JSON exchange document
        #[arg(long, default_value = "default")]
        corpus: String,
    },
    /// Homotopy classes of maps between two groupoids
    Ho {
        /// d3, BZ2, K2, 1, products like d2*BZ2, or a JSON file
        #[arg(long)]
        lhs: String,
        #[arg(long)]
        rhs: String,
    },
}

#[derive(Args, Debug, Clone)]
pub struct KernelFlags {
    /// Disable univalence at every level
    #[arg(long, conflicts_with = "ua_levels")]
    pub no_ua: bool,
    /// Levels at which univalence is available, e.g. 0,1
    #[arg(long, value_delimiter = ',')]
    pub ua_levels: Option<Vec<u32>>,
    /// Disable propositional resizing
    #[arg(long)]
    pub no_resizing: bool,
    /// Disable function extensionality
    #[arg(long)]
    pub no_funext: bool,
    /// Number of universes
    #[arg(long)]
    pub height: Option<u32>,
    /// Accept declarations without a body
    #[arg(long)]
    pub postulates: bool,
}

impl KernelFlags {
    pub fn flags(&self) -> Flags {
        let mut f = default_flags();
        if self.no_ua {
            f.ua_levels = BTreeSet::new();
        }
        if let Some(ls) = &self.ua_levels {
            f.ua_levels = ls.iter().copied().collect();
        }
        if self.no_resizing {
            f.resizing = false;
        }
        if self.no_funext {
            f.funext = false;
        }
        if let Some(h) = self.height {
            f.height = h;
        }
        f.postulates |= self.postulates;
        f
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kernel(args: &[&str]) -> Result<Flags, clap::Error> {
        let mut argv = vec!["hott", "stdlib"];
        argv.extend(args);
        match Cli::try_parse_from(argv)?.command {
            Command::Stdlib { kernel, .. } => Ok(kernel.flags()),
            _ => unreachable!(),
        }
    }

    #[test]
    fn kernel_flags() {
        let d = kernel(&[]).unwrap();
        assert_eq!(d, default_flags());
        assert!(kernel(&["--no-ua"]).unwrap().ua_levels.is_empty());
        let f = kernel(&["--ua-levels", "0,2", "--no-resizing", "--height", "4"]).unwrap();
        assert_eq!(f.ua_levels, BTreeSet::from([0, 2]));
        assert!(!f.resizing && f.funext);
        assert_eq!(f.height, 4);
        assert!(kernel(&["--no-ua", "--ua-levels", "1"]).is_err());
    }

    #[test]
    fn defaults() {
        let cli = Cli::try_parse_from(["hott", "model", "omega"]).unwrap();
        assert_eq!(cli.format, Format::Text);
        match cli.command {
            Command::Model(ModelCommand::Omega { k, corpus }) => assert_eq!((k, corpus.as_str()), (2, "default")),
            other => panic!("{other:?}"),
        }
        assert!(Cli::try_parse_from(["hott", "denote", "f.hott"]).is_err());
    }
}
