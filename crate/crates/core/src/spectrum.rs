//! Eigenvalue lists with multiplicity and provenance, and the certified
//! merge of per-component spectra into the spectrum of a disjoint union.
//!
//! For a disjoint union Ω = ⊔ Ω_i the spectrum is the multiset union of the
//! component spectra. Merging truncated lists is only sound if every
//! component has either supplied enough values or is known to have no
//! further eigenvalue below the k-th merged candidate; [`merge_spectra`]
//! enforces that and fails loudly instead of returning a wrong k-th value.

use crate::error::{Error, Result};
use serde::Serialize;

/// Where one eigenvalue came from.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeProvenance {
    /// Index of the component of the union (0 for a connected domain).
    pub component: usize,
    /// Human-readable mode label, e.g. `n=3`, `(i,j)=(1,2)`, `(m,s)=(2,1)`,
    /// `radial-1`, `#4`.
    pub mode: String,
    /// Solver that produced the value, e.g. `interval-secular`, `fem2d`.
    pub solver: String,
    /// Estimated absolute error of the value.
    pub abs_error: f64,
}

/// One eigenvalue with its multiplicity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumEntry {
    pub value: f64,
    pub multiplicity: usize,
    pub provenance: ModeProvenance,
}

/// Sorted eigenvalue list. Entries are non-decreasing in value; equal values
/// from different components stay separate entries so each keeps its own
/// provenance.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct Spectrum {
    entries: Vec<SpectrumEntry>,
}

impl Spectrum {
    /// Build from entries, sorting by value. Rejects non-finite values and
    /// zero multiplicities.
    pub fn from_entries(mut entries: Vec<SpectrumEntry>) -> Result<Spectrum> {
        for e in &entries {
            if !e.value.is_finite() {
                return Err(Error::NoConvergence(format!(
                    "non-finite eigenvalue {} in spectrum",
                    e.value
                )));
            }
            if e.multiplicity == 0 {
                return Err(Error::InvalidDomain("eigenvalue multiplicity must be >= 1".into()));
            }
        }
        entries.sort_by(|a, b| a.value.total_cmp(&b.value));
        Ok(Spectrum { entries })
    }

    pub fn entries(&self) -> &[SpectrumEntry] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Number of eigenvalues counted with multiplicity.
    pub fn len_with_multiplicity(&self) -> usize {
        self.entries.iter().map(|e| e.multiplicity).sum()
    }

    /// k-th eigenvalue, 1-based, counted with multiplicity.
    pub fn value(&self, k: usize) -> Option<f64> {
        if k == 0 {
            return None;
        }
        let mut seen = 0usize;
        for e in &self.entries {
            seen += e.multiplicity;
            if seen >= k {
                return Some(e.value);
            }
        }
        None
    }

    /// All values expanded with multiplicity, ascending.
    pub fn flattened(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.len_with_multiplicity());
        for e in &self.entries {
            out.extend(std::iter::repeat(e.value).take(e.multiplicity));
        }
        out
    }

    /// Entry (with provenance) covering the k-th eigenvalue, 1-based.
    pub fn entry_for(&self, k: usize) -> Option<&SpectrumEntry> {
        if k == 0 {
            return None;
        }
        let mut seen = 0usize;
        for e in &self.entries {
            seen += e.multiplicity;
            if seen >= k {
                return Some(e);
            }
        }
        None
    }

    /// Keep only the first k eigenvalues counted with multiplicity,
    /// splitting the last entry's multiplicity if it straddles the cut.
    pub fn truncate_to(&mut self, k: usize) {
        let mut seen = 0usize;
        let mut keep = 0usize;
        for e in &mut self.entries {
            if seen >= k {
                break;
            }
            if seen + e.multiplicity > k {
                e.multiplicity = k - seen;
            }
            seen += e.multiplicity;
            keep += 1;
        }
        self.entries.truncate(keep);
    }

    /// Largest estimated absolute error over all entries.
    pub fn max_abs_error(&self) -> f64 {
        self.entries.iter().map(|e| e.provenance.abs_error).fold(0.0, f64::max)
    }

    /// Relabel every entry as belonging to the given union component.
    pub fn with_component(mut self, component: usize) -> Spectrum {
        for e in &mut self.entries {
            e.provenance.component = component;
        }
        self
    }
}

/// Merge truncated component spectra into the first k eigenvalues of the
/// disjoint union, with per-component certificates.
///
/// `parts[i]` is the (ascending, possibly truncated) spectrum of component
/// i. `tail_bounds[i]`, when finite, is a proven lower bound on every
/// eigenvalue of component i *after* the last supplied one. A component
/// that supplied fewer than k values and whose certificate
/// `max(last supplied value, tail bound)` is below the merged k-th
/// candidate might still hide a smaller eigenvalue, so the merge refuses
/// with [`Error::UndersuppliedComponent`] rather than guess.
///
/// Components with no tail bound certify only up to their last supplied
/// value (bound = that value): a part whose list is exhausted strictly
/// below the candidate k-th value is always reported undersupplied.
pub fn merge_spectra_with_bounds(
    parts: &[Spectrum],
    tail_bounds: &[f64],
    k: usize,
) -> Result<Spectrum> {
    if parts.is_empty() {
        return Err(Error::InvalidDomain("cannot merge zero spectra".into()));
    }
    if k == 0 {
        return Err(Error::InvalidDomain("eigenvalue index k must be >= 1".into()));
    }
    assert_eq!(parts.len(), tail_bounds.len(), "one tail bound per component");

    let mut entries: Vec<SpectrumEntry> = Vec::new();
    for (i, part) in parts.iter().enumerate() {
        for e in part.entries() {
            let mut e = e.clone();
            e.provenance.component = i;
            entries.push(e);
        }
    }
    let merged = Spectrum::from_entries(entries)?;

    if merged.len_with_multiplicity() < k {
        let supplied = merged.len_with_multiplicity();
        let worst = (0..parts.len())
            .min_by_key(|&i| parts[i].len_with_multiplicity())
            .unwrap_or(0);
        return Err(Error::UndersuppliedComponent {
            component: worst,
            supplied,
            last_value: merged.entries().last().map_or(f64::NEG_INFINITY, |e| e.value),
            needed: k,
        });
    }
    let kth = merged.value(k).unwrap();

    // Certification: every component must either have supplied >= k values
    // or be known to have nothing new strictly below the k-th candidate.
    for (i, part) in parts.iter().enumerate() {
        let supplied = part.len_with_multiplicity();
        if supplied >= k {
            continue;
        }
        let last = part.entries().last().map_or(f64::NEG_INFINITY, |e| e.value);
        let bound = if tail_bounds[i].is_finite() { tail_bounds[i].max(last) } else { last };
        if bound < kth {
            return Err(Error::UndersuppliedComponent {
                component: i,
                supplied,
                last_value: last,
                needed: k,
            });
        }
    }

    let mut out = merged;
    out.truncate_to(k);
    Ok(out)
}

/// [`merge_spectra_with_bounds`] with no tail information: each component
/// certifies only up to its last supplied value.
pub fn merge_spectra(parts: &[Spectrum], k: usize) -> Result<Spectrum> {
    let bounds = vec![f64::NEG_INFINITY; parts.len()];
    merge_spectra_with_bounds(parts, &bounds, k)
}

#[cfg(test)]
pub(crate) fn plain(values: &[f64]) -> Spectrum {
    let entries = values
        .iter()
        .enumerate()
        .map(|(i, &v)| SpectrumEntry {
            value: v,
            multiplicity: 1,
            provenance: ModeProvenance {
                component: 0,
                mode: format!("#{}", i + 1),
                solver: "test".into(),
                abs_error: 0.0,
            },
        })
        .collect();
    Spectrum::from_entries(entries).unwrap()
}
