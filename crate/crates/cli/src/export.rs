//! Artifact writers. Every float is printed with 17 significant digits in
//! scientific notation, so identical inputs give identical bytes.

use std::io::{self, Write};

use adsfront::caustic_maxwell::MaxwellSample;
use adsfront::frames::FrameData;
use adsfront::fronts::{FocalSample, FrontSample, SignChoice};
use adsfront::SemiVector;
use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:.16e}")
    }
}

pub const FRAME_COLUMNS: [&str; 21] = [
    "s", "t", "gamma_m1", "gamma_0", "gamma_1", "gamma_2", "b_m1", "b_0", "b_1", "b_2", "n_m1", "n_0", "n_1", "n_2",
    "t_m1", "t_0", "t_1", "t_2", "kappa_g", "kappa_n", "tau_g",
];

pub const CURVATURE_COLUMNS: [&str; 8] = [
    "s", "t", "kappa_g", "kappa_n", "tau_g", "dkappa_g", "dkappa_n", "dtau_g",
];

pub const FRONT_COLUMNS: [&str; 8] = ["s", "t", "mu", "sign", "x_m1", "x_0", "x_1", "x_2"];

pub const CAUSTIC_COLUMNS: [&str; 9] = ["t", "sign", "s", "kappa", "sigma", "x_m1", "x_0", "x_1", "x_2"];

pub const MAXWELL_COLUMNS: [&str; 13] = [
    "t", "kind", "s1", "mu1", "sign1", "s2", "mu2", "sign2", "x_m1", "x_0", "x_1", "x_2", "residual",
];

fn push_vec(row: &mut Vec<String>, v: &SemiVector) {
    row.extend(v.0.iter().map(|&x| fmt_f64(x)));
}

pub fn frame_row(f: &FrameData) -> Vec<String> {
    let mut row = vec![fmt_f64(f.s), fmt_f64(f.t)];
    for v in [&f.gamma, &f.bvec, &f.nvec, &f.tvec] {
        push_vec(&mut row, v);
    }
    row.extend([f.kappa_g, f.kappa_n, f.tau_g].map(fmt_f64));
    row
}

pub fn curvature_row(f: &FrameData) -> Vec<String> {
    [
        f.s, f.t, f.kappa_g, f.kappa_n, f.tau_g, f.dkappa_g, f.dkappa_n, f.dtau_g,
    ]
    .map(fmt_f64)
    .to_vec()
}

pub fn front_row(p: &FrontSample) -> Vec<String> {
    let mut row = vec![fmt_f64(p.s), fmt_f64(p.t), fmt_f64(p.mu), p.sign.name().to_string()];
    push_vec(&mut row, &p.point);
    row
}

pub fn caustic_row(p: &FocalSample) -> Vec<String> {
    let mut row = vec![
        fmt_f64(p.t),
        p.sign.name().to_string(),
        fmt_f64(p.s),
        fmt_f64(p.kappa),
        fmt_f64(p.sigma),
    ];
    push_vec(&mut row, &p.point);
    row
}

pub fn maxwell_row(m: &MaxwellSample) -> Vec<String> {
    let [a, b] = &m.preimages;
    let mut row = vec![
        fmt_f64(m.t),
        m.kind.name().to_string(),
        fmt_f64(a.s),
        fmt_f64(a.mu),
        a.sign.name().to_string(),
        fmt_f64(b.s),
        fmt_f64(b.mu),
        b.sign.name().to_string(),
    ];
    push_vec(&mut row, &m.point);
    row.push(fmt_f64(m.residual));
    row
}

/// Comma-separated table with a header row and LF line endings.
pub fn write_csv<W: Write, I>(out: W, header: &[&str], rows: I) -> io::Result<()>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush()
}

/// Front sheet sampled on an `n_s` by `n_mu` grid at one `t`; `points` is
/// row-major in `s`.
pub struct FrontStrip<'a> {
    pub t: f64,
    pub sign: SignChoice,
    pub n_s: usize,
    pub n_mu: usize,
    pub closed: bool,
    pub points: &'a [SemiVector],
}

/// Global chart of anti-de Sitter 3-space used for meshes:
/// `(x_1, x_2, atan2(x_0, x_m1))`.
pub fn mesh_chart(p: &SemiVector) -> [f64; 3] {
    [p.0[2], p.0[3], p.0[1].atan2(p.0[0])]
}

/// Wavefront OBJ with one object per sign and one group of quads per `t`.
pub fn write_obj<W: Write>(mut out: W, strips: &[FrontStrip<'_>]) -> io::Result<()> {
    writeln!(out, "# lightlike front mesh")?;
    writeln!(out, "# vertex coordinates: x_1 x_2 atan2(x_0, x_m1)")?;
    let mut base = 1usize;
    for sign in SignChoice::BOTH {
        let mine: Vec<&FrontStrip> = strips.iter().filter(|s| s.sign == sign).collect();
        if mine.is_empty() {
            continue;
        }
        writeln!(out, "o front_{}", sign.name())?;
        for strip in mine {
            writeln!(out, "g t_{}", fmt_f64(strip.t))?;
            for p in strip.points {
                let [a, b, c] = mesh_chart(p);
                writeln!(out, "v {} {} {}", fmt_f64(a), fmt_f64(b), fmt_f64(c))?;
            }
            let idx = |i: usize, k: usize| base + i * strip.n_mu + k;
            let rows = if strip.closed {
                strip.n_s
            } else {
                strip.n_s.saturating_sub(1)
            };
            for i in 0..rows {
                let j = (i + 1) % strip.n_s;
                for k in 0..strip.n_mu.saturating_sub(1) {
                    writeln!(out, "f {} {} {} {}", idx(i, k), idx(j, k), idx(j, k + 1), idx(i, k + 1))?;
                }
            }
            base += strip.points.len();
        }
    }
    Ok(())
}

/// Pretty JSON whose floats use the same formatting as the CSV writers;
/// non-finite values become `null`.
struct SciFormatter<'a>(PrettyFormatter<'a>);

impl Formatter for SciFormatter<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        w.write_all(format!("{value:.16e}").as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }

    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn write_json<W: Write, T: Serialize + ?Sized>(mut out: W, value: &T) -> io::Result<()> {
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SciFormatter(PrettyFormatter::new()));
    value.serialize(&mut ser).map_err(io::Error::other)?;
    out.write_all(b"\n")
}

pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> String {
    let mut buf = Vec::new();
    write_json(&mut buf, value).expect("writing to memory");
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}
