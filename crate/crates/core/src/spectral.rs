//! Multidimensional FFTs, spectral resampling and trigonometric interpolation.
//!
//! Spectra are normalized so that `f(x) = sum_m c_m exp(2 pi i m.x)`.

use num_complex::Complex;
use rustfft::FftPlanner;

use crate::grid::{GridSpec, Point, MAX_DIM};
use crate::scalar::Real;

fn transform_axes<T: Real>(grid: &GridSpec, data: &mut Vec<Complex<T>>, inverse: bool) {
    let size = grid.size();
    let mut planner = FftPlanner::<T>::new();
    let fft = if inverse {
        planner.plan_fft_inverse(size)
    } else {
        planner.plan_fft_forward(size)
    };
    let len = data.len();
    let rest = len / size;
    let mut scratch = vec![Complex::new(T::zero(), T::zero()); fft.get_inplace_scratch_len()];
    let mut buffer = vec![Complex::new(T::zero(), T::zero()); len];
    // Transform along the contiguous axis, then rotate the axes by
    // transposing the (rest x size) layout; n rotations restore the order.
    for _ in 0..grid.dim() {
        fft.process_with_scratch(data, &mut scratch);
        for (r, row) in data.chunks_exact(size).enumerate() {
            for (k, v) in row.iter().enumerate() {
                buffer[k * rest + r] = *v;
            }
        }
        std::mem::swap(data, &mut buffer);
    }
}

/// Forward transform of real node values.
pub fn forward<T: Real>(grid: &GridSpec, values: &[T]) -> Vec<Complex<T>> {
    assert_eq!(values.len(), grid.len());
    let mut data: Vec<Complex<T>> = values.iter().map(|&v| Complex::new(v, T::zero())).collect();
    transform_axes(grid, &mut data, false);
    let scale = T::one() / T::from_usize_lossy(grid.len());
    for c in &mut data {
        *c *= scale;
    }
    data
}

/// Inverse transform, keeping the real part.
pub fn inverse_real<T: Real>(grid: &GridSpec, spectrum: &[Complex<T>]) -> Vec<T> {
    assert_eq!(spectrum.len(), grid.len());
    let mut data = spectrum.to_vec();
    transform_axes(grid, &mut data, true);
    data.into_iter().map(|c| c.re).collect()
}

/// Projects a spectrum onto the Hermitian-symmetric (real-field) subspace.
pub fn hermitian_part<T: Real>(grid: &GridSpec, spectrum: &[Complex<T>]) -> Vec<Complex<T>> {
    let half = T::lit(0.5);
    grid.conjugate_table()
        .into_iter()
        .enumerate()
        .map(|(idx, c)| (spectrum[idx] + spectrum[c].conj()) * half)
        .collect()
}

/// Angular wavenumber `2 pi m` along one axis; zero at the Nyquist index.
#[inline]
pub fn wavenumber<T: Real>(grid: &GridSpec, k: usize) -> T {
    match grid.frequency(k) {
        Some(m) => T::two_pi() * T::from_i64(m).unwrap(),
        None => T::zero(),
    }
}

/// Wavenumber along `axis` for every flat spectral index.
pub fn axis_wavenumbers<T: Real>(grid: &GridSpec, axis: usize) -> Vec<T> {
    let k = wavenumber_table::<T>(grid);
    let stride = grid.stride(axis);
    let mut out = Vec::with_capacity(grid.len());
    while out.len() < grid.len() {
        for &kk in &k {
            out.extend(std::iter::repeat_n(kk, stride));
        }
    }
    out
}

/// True for every flat index whose mode has no Nyquist component.
pub fn resolved_mask(grid: &GridSpec) -> Vec<bool> {
    let half = grid.size() / 2;
    let mut mask = vec![true];
    for _ in 0..grid.dim() {
        let prev = std::mem::take(&mut mask);
        for k in 0..grid.size() {
            mask.extend(prev.iter().map(|&r| r && k != half));
        }
    }
    mask
}

/// Per-axis wavenumber tables for a grid.
pub fn wavenumber_table<T: Real>(grid: &GridSpec) -> Vec<T> {
    (0..grid.size()).map(|k| wavenumber(grid, k)).collect()
}

/// Spectral targets of a coarse mode on a grid with twice the resolution.
/// Nyquist entries are split evenly between `+N/2` and `-N/2`.
fn refined_targets(coarse: &GridSpec, idx: usize) -> Vec<(usize, f64)> {
    let fine_size = coarse.size() * 2;
    let half = coarse.size() / 2;
    let multi = coarse.unravel(idx);
    let mut targets: Vec<([usize; MAX_DIM], f64)> = vec![([0; MAX_DIM], 1.0)];
    for axis in 0..coarse.dim() {
        let k = multi[axis];
        let mut next = Vec::with_capacity(targets.len() * 2);
        for (t, w) in targets {
            if k == half {
                let mut a = t;
                a[axis] = half;
                let mut b = t;
                b[axis] = fine_size - half;
                next.push((a, w * 0.5));
                next.push((b, w * 0.5));
            } else {
                let m = coarse.frequency(k).unwrap();
                let mut a = t;
                a[axis] = m.rem_euclid(fine_size as i64) as usize;
                next.push((a, w));
            }
        }
        targets = next;
    }
    let fine = coarse.refined();
    targets.into_iter().map(|(t, w)| (fine.ravel(&t), w)).collect()
}

/// Node values on the refined grid of the trigonometric interpolant.
pub fn upsample<T: Real>(coarse: &GridSpec, spectrum: &[Complex<T>]) -> Vec<T> {
    let fine = coarse.refined();
    let mut padded = vec![Complex::new(T::zero(), T::zero()); fine.len()];
    for (idx, &c) in spectrum.iter().enumerate() {
        if c.re == T::zero() && c.im == T::zero() {
            continue;
        }
        for (target, w) in refined_targets(coarse, idx) {
            padded[target] += c * T::lit(w);
        }
    }
    inverse_real(&fine, &padded)
}

/// Truncates a refined-grid spectrum back to the coarse grid. Modes `+-N/2`
/// fold onto the coarse Nyquist index; everything beyond is discarded.
pub fn downsample<T: Real>(coarse: &GridSpec, fine_spectrum: &[Complex<T>]) -> Vec<Complex<T>> {
    let fine = coarse.refined();
    let half = coarse.size() as i64 / 2;
    let mut out = vec![Complex::new(T::zero(), T::zero()); coarse.len()];
    for (idx, &c) in fine_spectrum.iter().enumerate() {
        let multi = fine.unravel(idx);
        let mut keep = true;
        let mut target = [0usize; MAX_DIM];
        for axis in 0..coarse.dim() {
            let k = multi[axis] as i64;
            let m = if k <= fine.size() as i64 / 2 {
                k
            } else {
                k - fine.size() as i64
            };
            if m.abs() > half {
                keep = false;
                break;
            }
            target[axis] = m.rem_euclid(coarse.size() as i64) as usize;
        }
        if keep {
            out[coarse.ravel(&target)] += c;
        }
    }
    out
}

/// Largest resolved `|m_j|` per axis among coefficients above
/// `rel_cutoff * max|c|`. Nyquist content counts as `N/2`.
pub fn bandwidth<T: Real>(grid: &GridSpec, spectrum: &[Complex<T>], rel_cutoff: T) -> [usize; MAX_DIM] {
    let scale = spectrum.iter().map(|c| c.norm_sqr()).fold(T::zero(), T::max);
    let mut out = [0usize; MAX_DIM];
    if scale == T::zero() {
        return out;
    }
    let cut = scale * rel_cutoff * rel_cutoff;
    for (idx, c) in spectrum.iter().enumerate() {
        if c.norm_sqr() <= cut {
            continue;
        }
        let multi = grid.unravel(idx);
        for axis in 0..grid.dim() {
            let m = match grid.frequency(multi[axis]) {
                Some(m) => m.unsigned_abs() as usize,
                None => grid.size() / 2,
            };
            out[axis] = out[axis].max(m);
        }
    }
    out
}

/// Per-axis interpolation weights at coordinate `x`: `exp(2 pi i m x)` for
/// resolved modes and `cos(pi N x)` at Nyquist.
fn axis_weights<T: Real>(grid: &GridSpec, x: T) -> Vec<Complex<T>> {
    (0..grid.size())
        .map(|k| match grid.frequency(k) {
            Some(m) => {
                let phase = T::two_pi() * T::from_i64(m).unwrap() * x;
                Complex::new(phase.cos(), phase.sin())
            }
            None => {
                let phase = T::PI() * T::from_usize_lossy(grid.size()) * x;
                Complex::new(phase.cos(), T::zero())
            }
        })
        .collect()
}

/// Exact trigonometric interpolation of one spectrum at a point, by
/// contracting one axis at a time.
pub fn interpolate<T: Real>(grid: &GridSpec, spectrum: &[Complex<T>], point: &[T]) -> T {
    let size = grid.size();
    let mut current = spectrum.to_vec();
    for axis in (0..grid.dim()).rev() {
        let w = axis_weights(grid, crate::grid::wrap(point[axis]));
        let next_len = current.len() / size;
        let mut next = vec![Complex::new(T::zero(), T::zero()); next_len];
        for (p, slot) in next.iter_mut().enumerate() {
            let row = &current[p * size..(p + 1) * size];
            let mut acc = Complex::new(T::zero(), T::zero());
            for (c, wk) in row.iter().zip(&w) {
                acc += *c * *wk;
            }
            *slot = acc;
        }
        current = next;
    }
    current[0].re
}

/// Sparse joint representation of several band-limited fields for fast
/// repeated evaluation at scattered points.
///
/// Only one half of the Hermitian-symmetric spectrum is stored; the
/// coefficients are pre-doubled so evaluation is a real-part sum.
#[derive(Clone, Debug)]
pub struct SpectralBundle<T> {
    dim: usize,
    fields: usize,
    modes: Vec<[i32; MAX_DIM]>,
    /// Offsets of each mode's per-axis factors in the power table.
    offsets: Vec<[usize; MAX_DIM]>,
    coeff_re: Vec<T>,
    /// Negated imaginary parts, so a term is `re * p.re + im * p.im`.
    coeff_im: Vec<T>,
    max_freq: [usize; MAX_DIM],
    truncation_bound: Vec<T>,
}

fn in_upper_half(mode: &[i32; MAX_DIM]) -> Option<bool> {
    for &m in mode {
        if m > 0 {
            return Some(true);
        }
        if m < 0 {
            return Some(false);
        }
    }
    None
}

impl<T: Real> SpectralBundle<T> {
    /// Builds a bundle from spectra of real fields on `grid`. A mode is kept
    /// when any coefficient exceeds `rel_cutoff` times the largest
    /// coefficient of the whole bundle, so fields that are zero up to
    /// rounding do not drag in every mode; the discarded mass bounds the
    /// evaluation error.
    pub fn new(grid: &GridSpec, spectra: &[&[Complex<T>]], rel_cutoff: T) -> Self {
        let fields = spectra.len();
        let scale = spectra
            .iter()
            .flat_map(|s| s.iter().map(|c| c.norm_sqr()))
            .fold(T::zero(), T::max);
        let cut = scale * rel_cutoff * rel_cutoff;
        let mut modes = Vec::new();
        let mut coeff_re = Vec::new();
        let mut coeff_im = Vec::new();
        let mut max_freq = [0usize; MAX_DIM];
        let mut truncation_bound = vec![T::zero(); fields];
        let half = grid.size() / 2;
        for idx in 0..grid.len() {
            let keep = scale > T::zero() && (0..fields).any(|f| spectra[f][idx].norm_sqr() > cut);
            if !keep {
                for f in 0..fields {
                    truncation_bound[f] += spectra[f][idx].norm();
                }
                continue;
            }
            let multi = grid.unravel(idx);
            // Expand Nyquist axes into +-N/2 with halved weights.
            let mut expanded: Vec<([i32; MAX_DIM], T)> = vec![([0; MAX_DIM], T::one())];
            for axis in 0..grid.dim() {
                let k = multi[axis];
                let mut next = Vec::with_capacity(expanded.len() * 2);
                for (m, w) in expanded {
                    if k == half {
                        let mut a = m;
                        a[axis] = half as i32;
                        let mut b = m;
                        b[axis] = -(half as i32);
                        next.push((a, w * T::lit(0.5)));
                        next.push((b, w * T::lit(0.5)));
                    } else {
                        let mut a = m;
                        a[axis] = grid.frequency(k).unwrap() as i32;
                        next.push((a, w));
                    }
                }
                expanded = next;
            }
            for (mode, w) in expanded {
                let factor = match in_upper_half(&mode) {
                    Some(true) => T::lit(2.0),
                    Some(false) => continue,
                    None => T::one(),
                };
                for axis in 0..grid.dim() {
                    max_freq[axis] = max_freq[axis].max(mode[axis].unsigned_abs() as usize);
                }
                modes.push(mode);
                for spectrum in spectra {
                    let c = spectrum[idx] * (w * factor);
                    coeff_re.push(c.re);
                    coeff_im.push(-c.im);
                }
            }
        }
        let width = max_freq.iter().map(|&m| 2 * m + 1).max().unwrap_or(1);
        let offsets = modes
            .iter()
            .map(|mode| {
                let mut o = [0usize; MAX_DIM];
                for axis in 0..grid.dim() {
                    o[axis] = axis * width + (mode[axis] + max_freq[axis] as i32) as usize;
                }
                o
            })
            .collect();
        Self {
            dim: grid.dim(),
            fields,
            modes,
            offsets,
            coeff_re,
            coeff_im,
            max_freq,
            truncation_bound,
        }
    }

    pub fn field_count(&self) -> usize {
        self.fields
    }

    pub fn mode_count(&self) -> usize {
        self.modes.len()
    }

    /// Upper bound on the pointwise interpolation error of field `f` caused
    /// by discarded modes.
    pub fn truncation_bound(&self, f: usize) -> T {
        self.truncation_bound[f]
    }

    /// Evaluates every field at `point`, writing into `out`.
    pub fn eval_into(&self, point: &Point<T>, out: &mut [T], powers: &mut Vec<Complex<T>>) {
        debug_assert_eq!(out.len(), self.fields);
        for o in out.iter_mut() {
            *o = T::zero();
        }
        // powers[axis][m + max] = exp(2 pi i m x_axis)
        let width: usize = self.max_freq.iter().map(|&m| 2 * m + 1).max().unwrap_or(1);
        powers.clear();
        powers.resize(self.dim * width, Complex::new(T::zero(), T::zero()));
        for axis in 0..self.dim {
            let mf = self.max_freq[axis];
            let phase = T::two_pi() * point[axis];
            let base = Complex::new(phase.cos(), phase.sin());
            let row = &mut powers[axis * width..axis * width + 2 * mf + 1];
            row[mf] = Complex::new(T::one(), T::zero());
            for m in 1..=mf {
                let p = row[mf + m - 1] * base;
                row[mf + m] = p;
                row[mf - m] = p.conj();
            }
        }
        let one = Complex::new(T::one(), T::zero());
        for (mi, off) in self.offsets.iter().enumerate() {
            let mut phase = one;
            for &o in &off[..self.dim] {
                phase *= powers[o];
            }
            let range = mi * self.fields..(mi + 1) * self.fields;
            for ((o, re), im) in out
                .iter_mut()
                .zip(&self.coeff_re[range.clone()])
                .zip(&self.coeff_im[range])
            {
                *o += *re * phase.re + *im * phase.im;
            }
        }
    }

    pub fn eval(&self, point: &Point<T>) -> Vec<T> {
        let mut out = vec![T::zero(); self.fields];
        let mut powers = Vec::new();
        self.eval_into(point, &mut out, &mut powers);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field(grid: &GridSpec, f: impl Fn(&Point<f64>) -> f64) -> Vec<f64> {
        (0..grid.len()).map(|i| f(&grid.node(i))).collect()
    }

    #[test]
    fn roundtrip_reproduces_values() {
        let g = GridSpec::new(3, 8).unwrap();
        let v = field(&g, |p| (p[0] * 3.0).sin() + p[1] * p[2]);
        let back = inverse_real(&g, &forward(&g, &v));
        for (a, b) in v.iter().zip(&back) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn single_mode_coefficients() {
        let g = GridSpec::new(2, 8).unwrap();
        let tau = std::f64::consts::TAU;
        let v = field(&g, |p| (tau * (p[0] + 2.0 * p[1])).cos());
        let s = forward(&g, &v);
        assert!((s[g.mode_index(&[1, 2])].re - 0.5).abs() < 1e-14);
        assert!((s[g.mode_index(&[-1, -2])].re - 0.5).abs() < 1e-14);
    }

    #[test]
    fn interpolation_hits_nodes_and_off_grid_values() {
        let g = GridSpec::new(2, 16).unwrap();
        let tau = std::f64::consts::TAU;
        let f = |p: &Point<f64>| (tau * p[0]).sin() * (tau * 3.0 * p[1]).cos() + 0.25;
        let s = forward(&g, &field(&g, f));
        for idx in [0, 7, 100, 255] {
            let p = g.node::<f64>(idx);
            assert!((interpolate(&g, &s, &p) - f(&p)).abs() < 1e-13);
        }
        let p = [0.123, 0.777, 0.0, 0.0];
        assert!((interpolate(&g, &s, &p) - f(&p)).abs() < 1e-13);
    }

    #[test]
    fn nyquist_interpolant_is_real_cosine() {
        let g = GridSpec::new(2, 8).unwrap();
        let v = field(&g, |p| (std::f64::consts::PI * 8.0 * p[0]).cos());
        let s = forward(&g, &v);
        let p = [0.3, 0.1, 0.0, 0.0];
        let expect = (std::f64::consts::PI * 8.0 * 0.3).cos();
        assert!((interpolate(&g, &s, &p) - expect).abs() < 1e-13);
        let b = SpectralBundle::new(&g, &[&s], 1e-14);
        assert!((b.eval(&p)[0] - expect).abs() < 1e-13);
    }

    #[test]
    fn upsample_then_downsample_is_identity() {
        let g = GridSpec::new(2, 8).unwrap();
        let tau = std::f64::consts::TAU;
        let v = field(&g, |p| (tau * (p[0] - p[1])).sin() + (tau * 2.0 * p[1]).cos());
        let s = forward(&g, &v);
        let fine_vals = upsample(&g, &s);
        let back = downsample(&g, &forward(&g.refined(), &fine_vals));
        for (a, b) in s.iter().zip(&back) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn bundle_matches_dense_interpolation() {
        let g = GridSpec::new(3, 8).unwrap();
        let tau = std::f64::consts::TAU;
        let a = forward(&g, &field(&g, |p| (tau * p[0]).sin() * (tau * 2.0 * p[2]).cos()));
        let b = forward(&g, &field(&g, |p| 1.0 + (tau * (p[1] + p[2])).cos()));
        let bundle = SpectralBundle::new(&g, &[&a, &b], 1e-13);
        assert!(bundle.mode_count() < 10);
        let p = [0.31, 0.62, 0.93, 0.0];
        let out = bundle.eval(&p);
        assert!((out[0] - interpolate(&g, &a, &p)).abs() < 1e-13);
        assert!((out[1] - interpolate(&g, &b, &p)).abs() < 1e-13);
    }

    #[test]
    fn bandwidth_detects_modes() {
        let g = GridSpec::new(2, 16).unwrap();
        let tau = std::f64::consts::TAU;
        let s = forward(&g, &field(&g, |p| (tau * 3.0 * p[0]).sin() + (tau * p[1]).cos()));
        let bw = bandwidth(&g, &s, 1e-13);
        assert_eq!(&bw[..2], &[3, 1]);
    }
}
