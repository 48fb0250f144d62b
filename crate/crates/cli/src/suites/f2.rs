use wbar::chain::format_coeff;
use wbar::norms::weighted_l1_exact;
use wbar::{Coeff, F2Construction, F2Error};

use crate::config::{Context, F2Params};
use crate::error::HarnessError;
use crate::report::{fmt_f64, fmt_opt, Table};
use crate::suites::{ok_str, SuiteOutput};

pub const LEVEL_HEADER: &[&str] = &[
    "level",
    "size",
    "expected_size",
    "min_length",
    "max_length",
    "length_bound",
    "positive_words",
    "markers_injective",
    "positive_signs",
    "b_support",
    "b_support_expected",
    "b_l1",
    "b_l1_expected",
    "telescoping_ok",
    "tail_support",
    "ok",
];

pub const DECAY_HEADER: &[&str] = &[
    "n",
    "p",
    "level",
    "increment_support",
    "increment_norm",
    "increment_envelope",
    "closed_form_envelope",
    "tail_support",
    "tail_norm",
    "tail_envelope",
    "row_ok",
    "monotone_from",
    "tail_monotone_from",
    "eventually_decreasing",
    "ok",
];

pub fn run(_ctx: &Context, params: &F2Params) -> Result<SuiteOutput, HarnessError> {
    let f = F2Construction::build(params.levels + 1)?;
    let summaries = f.summaries();
    let mut levels = Table::new("f2-levels", LEVEL_HEADER);
    let mut telescoping_ok = true;
    for s in summaries.iter().take(params.levels + 1) {
        let d = s.level;
        let b = f.partial_sum_b(d)?;
        let support_expected: usize = (0..=d).map(|j| 2 * 4usize.pow(j as u32)).sum();
        let l1 = weighted_l1_exact(&b, 0);
        let l1_expected = Coeff::from_integer(((1u64 << (d + 1)) - 1).into());
        let (tele, tail_support) = match f.boundary_tail(d) {
            Ok(tail) => (true, tail.len()),
            Err(F2Error::TelescopingMismatch { .. }) => (false, 0),
            Err(e) => return Err(e.into()),
        };
        telescoping_ok &= tele;
        let ok = s.size as u64 == s.expected_size
            && s.positive_words
            && s.markers_injective
            && s.max_length <= s.length_bound
            && b.len() == support_expected
            && l1 == l1_expected
            && tele
            && tail_support == 4usize.pow(d as u32 + 1);
        levels.push(
            vec![
                d.to_string(),
                s.size.to_string(),
                s.expected_size.to_string(),
                s.min_length.to_string(),
                s.max_length.to_string(),
                s.length_bound.to_string(),
                ok_str(s.positive_words),
                ok_str(s.markers_injective),
                s.positive_signs.to_string(),
                b.len().to_string(),
                support_expected.to_string(),
                format_coeff(&l1),
                format_coeff(&l1_expected),
                ok_str(tele),
                tail_support.to_string(),
                ok_str(ok),
            ],
            ok,
        );
    }
    let mut notes = vec![format!(
        "f2-vanish: telescoping {} for D = 0..={}",
        if telescoping_ok { "ok" } else { "FAILED" },
        params.levels
    )];
    let mut decay = Table::new("f2-decay", DECAY_HEADER);
    for pair in &params.norms {
        let r = f.decay_report(params.levels, pair.weight, pair.exponent)?;
        for row in &r.rows {
            decay.push(
                vec![
                    pair.weight.to_string(),
                    pair.exponent.to_string(),
                    row.level.to_string(),
                    row.increment_support.to_string(),
                    fmt_f64(row.increment_norm),
                    fmt_f64(row.increment_envelope),
                    fmt_f64(row.closed_form_envelope),
                    row.tail_support.to_string(),
                    fmt_f64(row.tail_norm),
                    fmt_f64(row.tail_envelope),
                    ok_str(row.ok),
                    fmt_opt(r.monotone_from),
                    fmt_opt(r.tail_monotone_from),
                    ok_str(r.eventually_decreasing),
                    ok_str(r.ok),
                ],
                r.ok && row.ok,
            );
        }
        notes.push(match r.monotone_from {
            Some(d) => format!("f2-vanish: decay at {pair} monotone from D={d}"),
            None => format!("f2-vanish: no monotone decay at {pair} through D={}", params.levels),
        });
    }
    Ok(SuiteOutput { tables: vec![levels, decay], files: Vec::new(), notes })
}
