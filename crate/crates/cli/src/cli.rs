//! Argument definitions.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::io::{parse_point, Point};

#[derive(Debug, Parser)]
#[command(name = "hilbert", version, about = "Hilbert geometry of strictly convex domains and surface groups")]
pub struct Cli {
    /// Acceptance tolerance for pass/fail fields; each command has its own default.
    #[arg(long, global = true, env = "HILBERT_TOLERANCE", value_parser = tolerance)]
    pub tolerance: Option<f64>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct SvgArgs {
    /// Write an SVG picture of the result to this path.
    #[arg(long)]
    pub svg: Option<PathBuf>,
    /// Picture width and height in pixels.
    #[arg(long, default_value_t = 512, value_parser = clap::value_parser!(u32).range(64..=8192))]
    pub size: u32,
    /// Stroke width in pixels.
    #[arg(long, default_value_t = 1.5, value_parser = stroke)]
    pub stroke: f64,
    /// Omit point labels.
    #[arg(long)]
    pub no_labels: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CheckMode {
    Order,
    Interval,
    Subspace,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    Genus2Octagon,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check strict convexity of a domain on random chords.
    Validate {
        #[arg(long)]
        domain: PathBuf,
        #[arg(long, default_value_t = 2000, value_parser = clap::value_parser!(u64).range(3..=1_000_000))]
        samples: u64,
        #[arg(long)]
        seed: u64,
    },
    /// Hilbert distance between two points.
    Dist {
        #[arg(long)]
        domain: PathBuf,
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        x: Point,
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        y: Point,
        #[command(flatten)]
        svg: SvgArgs,
    },
    /// Points along the geodesic from x through y.
    Geodesic {
        #[arg(long)]
        domain: PathBuf,
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        x: Point,
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        y: Point,
        /// Number of equally spaced steps from x to y.
        #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u64).range(1..=10_000))]
        steps: u64,
        /// Continue past y to this Hilbert distance from x.
        #[arg(long, value_parser = nonnegative)]
        until: Option<f64>,
        #[command(flatten)]
        svg: SvgArgs,
    },
    /// Sampled boundary of a Hilbert ball.
    Ball {
        #[arg(long)]
        domain: PathBuf,
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        center: Point,
        #[arg(long, value_parser = nonnegative)]
        radius: f64,
        #[arg(long, default_value_t = 64, value_parser = clap::value_parser!(u64).range(3..=100_000))]
        k: u64,
        #[command(flatten)]
        svg: SvgArgs,
    },
    /// Sampled symmetry, triangle inequality and additivity along chords.
    Axioms {
        #[arg(long)]
        domain: PathBuf,
        #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(3..=1_000_000))]
        samples: u64,
        #[arg(long)]
        seed: u64,
    },
    /// Chords separating three collinear points.
    Separate {
        #[arg(long)]
        domain: PathBuf,
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        a: Point,
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        b: Point,
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        c: Point,
        #[command(flatten)]
        svg: SvgArgs,
    },
    /// Check a sampled map for order, interval or subspace preservation.
    CheckOrder {
        #[arg(long)]
        samples: PathBuf,
        #[arg(long, value_enum, default_value_t = CheckMode::Order)]
        mode: CheckMode,
    },
    /// Fit a projective map to sampled pairs.
    Fit {
        #[arg(long)]
        samples: PathBuf,
    },
    /// Compare distances before and after a projective map.
    VerifyIsometry {
        /// Map file: {"mat": rows} or {"A", "b", "c", "d"}.
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        domain: PathBuf,
        #[arg(long, default_value_t = 500, value_parser = clap::value_parser!(u64).range(3..=1_000_000))]
        pairs: u64,
        #[arg(long)]
        seed: u64,
    },
    /// Orthogonal part of a sampled unit-disk isometry fixing the origin.
    DiskOrthogonal {
        #[arg(long)]
        samples: PathBuf,
    },
    /// Closed surface groups and their geodesics.
    Surface {
        #[command(subcommand)]
        command: SurfaceCommand,
    },
    /// Render a scene file to SVG.
    Render {
        #[arg(long)]
        scene: PathBuf,
        #[command(flatten)]
        svg: SvgArgs,
    },
}

#[derive(Debug, Args)]
pub struct GroupArg {
    /// Group file; the genus-2 octagon group when absent.
    #[arg(long)]
    pub group: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CutoffArg {
    /// Word-length cutoff for conjugating elements.
    #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u64).range(1..=12))]
    pub cutoff: u64,
}

#[derive(Debug, Subcommand)]
pub enum SurfaceCommand {
    /// Write a preset group.
    New {
        #[arg(long, value_enum)]
        preset: Preset,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Closed geodesics of word length at most max-len.
    Enumerate {
        #[command(flatten)]
        group: GroupArg,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..=6))]
        max_len: u64,
    },
    /// Crossings of two closed geodesics.
    Intersect {
        #[command(flatten)]
        group: GroupArg,
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[command(flatten)]
        cutoff: CutoffArg,
        #[command(flatten)]
        svg: SvgArgs,
    },
    /// Whether a closed geodesic is simple.
    Simple {
        #[command(flatten)]
        group: GroupArg,
        #[arg(long)]
        word: String,
        #[command(flatten)]
        cutoff: CutoffArg,
    },
    /// Whether a collection of closed geodesics fills the surface.
    Filling {
        #[command(flatten)]
        group: GroupArg,
        #[arg(long)]
        collection: PathBuf,
        #[command(flatten)]
        cutoff: CutoffArg,
        #[command(flatten)]
        svg: SvgArgs,
    },
    /// Heuristic closedness test of a geodesic against a filling collection.
    Classify {
        #[command(flatten)]
        group: GroupArg,
        #[arg(long)]
        collection: PathBuf,
        /// Geodesic given by a word; alternatively give both endpoints.
        #[arg(long, conflicts_with_all = ["repelling", "attracting"])]
        word: Option<String>,
        /// Chart point projected radially to the boundary.
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true, requires = "attracting")]
        repelling: Option<Point>,
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true, requires = "repelling")]
        attracting: Option<Point>,
        /// Flow distance covered by each window; defaults to the primitive
        /// length of `--word`, or 10 for explicit endpoints.
        #[arg(long, value_parser = positive)]
        window: Option<f64>,
    },
    /// Whether a collection is simple and pairwise disjoint.
    Lamination {
        #[command(flatten)]
        group: GroupArg,
        #[arg(long)]
        collection: PathBuf,
        #[command(flatten)]
        cutoff: CutoffArg,
    },
}

fn float(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{s}` is not finite"))
    }
}

fn positive(s: &str) -> Result<f64, String> {
    let v = float(s)?;
    if v > 0.0 {
        Ok(v)
    } else {
        Err("must be positive".into())
    }
}

fn nonnegative(s: &str) -> Result<f64, String> {
    let v = float(s)?;
    if v >= 0.0 {
        Ok(v)
    } else {
        Err("must be non-negative".into())
    }
}

fn tolerance(s: &str) -> Result<f64, String> {
    let v = float(s)?;
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err("must lie in (0, 1)".into())
    }
}

fn stroke(s: &str) -> Result<f64, String> {
    let v = float(s)?;
    if v > 0.0 && v <= 20.0 {
        Ok(v)
    } else {
        Err("must lie in (0, 20]".into())
    }
}
