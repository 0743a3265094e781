use dynmle::conditions::{psi_mixing_constant, LdRateFunction};
use dynmle::inference::{grid_mle, GridOptions};
use dynmle::simulate::simulate;
use dynmle::{
    ConfiguredFamily, HiddenSpec, MarkovSystem, ModelFamily, ObservationSpec, ParameterBox, ParameterPoint, Scalar,
};

const BOX_LO: f64 = 0.01;
const BOX_HI: f64 = 0.99;
pub const MAX_N: usize = 20_000;
pub const MAX_RESOLUTION: usize = 401;

fn text(e: dynmle::Error) -> String {
    e.to_string()
}

fn open_unit(v: f64, name: &str) -> Result<(), String> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(format!("{name} must lie in (0, 1)"))
    }
}

/// Normalized log-likelihood of the flip-probability family (means 0 and
/// 1, Gaussian noise of width `std`) on data simulated at `theta0`, over a
/// grid of `resolution` points on `[0.01, 0.99]`.
pub fn likelihood_curve(theta0: f64, std: f64, n: usize, seed: u64, resolution: usize) -> Result<Vec<f64>, String> {
    if !(BOX_LO..=BOX_HI).contains(&theta0) {
        return Err(format!("theta0 must lie in [{BOX_LO}, {BOX_HI}]"));
    }
    if !(1..=MAX_N).contains(&n) {
        return Err(format!("n must lie in 1..={MAX_N}"));
    }
    if !(2..=MAX_RESOLUTION).contains(&resolution) {
        return Err(format!("resolution must lie in 2..={MAX_RESOLUTION}"));
    }
    let family = ConfiguredFamily::new(
        HiddenSpec::Flip2,
        ObservationSpec::Gaussian {
            means: vec![0.0, 1.0],
            mean_scale: None,
            std: Scalar::Fixed(std),
        },
        ParameterBox::new(vec![(BOX_LO, BOX_HI)]).map_err(text)?,
    )
    .map_err(text)?;
    let theta0 = ParameterPoint::scalar(theta0);
    let hidden = family.hidden(&theta0).map_err(text)?;
    let model = family.observation(&theta0).map_err(text)?;
    let y = simulate(&hidden, &model, n, seed);
    let surface = grid_mle(&family, &y, &[resolution], GridOptions::default()).map_err(text)?;
    Ok(surface.grid.iter().flat_map(|p| [p.theta[0], p.value]).collect())
}

/// Rate `I(a)` of the symbol frequency under i.i.d. Bernoulli(`p`) at
/// `points` values of `a` spread over `[0, 1]`; `inf` outside the
/// reachable range.
pub fn rate_curve(p: f64, points: usize) -> Result<Vec<f64>, String> {
    open_unit(p, "p")?;
    if !(2..=1000).contains(&points) {
        return Err("points must lie in 2..=1000".into());
    }
    let system = MarkovSystem::from_stochastic(&[vec![1.0 - p, p], vec![1.0 - p, p]]).map_err(text)?;
    let rate = LdRateFunction::new(&system, |a, _| a as f64).map_err(text)?;
    Ok((0..points)
        .flat_map(|i| {
            let a = i as f64 / (points - 1) as f64;
            [a, rate.rate(a)]
        })
        .collect())
}

/// `L(ell) = max P^ell(a, b) / pi(b)` of the two-state flip chain for
/// `ell = 1 ..= max_ell`.
pub fn mixing_profile(q: f64, max_ell: usize) -> Result<Vec<f64>, String> {
    open_unit(q, "q")?;
    if !(1..=200).contains(&max_ell) {
        return Err("max_ell must lie in 1..=200".into());
    }
    let system = MarkovSystem::from_stochastic(&[vec![1.0 - q, q], vec![q, 1.0 - q]]).map_err(text)?;
    (1..=max_ell)
        .map(|ell| {
            let cert = psi_mixing_constant(&system, ell).map_err(text)?;
            Ok([ell as f64, cert.l_theta.unwrap_or(f64::NAN)])
        })
        .collect::<Result<Vec<_>, String>>()
        .map(|v| v.concat())
}
