//! Command implementations: tensor-cache lifecycle, experiment runs and
//! report output.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};

use hboltz_core::basis::{n_basis, MultiIndex};
use hboltz_core::kernel::KernelModel;
use hboltz_core::models::{bgk_rhs, linearized_operator, spectral_radius, HybridModel};
use hboltz_core::solver::{
    bkw_coeffs, marginal_1d, marginal_2d, moments, project_bigaussian, project_discontinuous,
    rk4_integrate, BkwReference, SpectralState,
};
use hboltz_core::tensor::{
    assemble, memory_estimate, read_header, AssembleOptions, CollisionTensor,
};

use crate::config::{Experiment, ModelKind, RunConfig};

const GIB: f64 = (1u64 << 30) as f64;

pub fn cmd_assemble(config: &RunConfig) -> Result<()> {
    let path = config.cache_file();
    if let Ok(header) = read_header(&path) {
        if header.eta.to_bits() == config.eta.to_bits() && header.m0 == config.m0 {
            println!(
                "cache hit: {} (eta = {}, M0 = {}, {} entries) -- no recomputation",
                path.display(),
                header.eta,
                header.m0,
                header.entry_count
            );
            return Ok(());
        }
    }
    fs::create_dir_all(&config.cache_dir)
        .with_context(|| format!("creating cache dir {}", config.cache_dir.display()))?;
    let kernel = KernelModel::new(config.eta, config.quad_spec())?;
    let opts = AssembleOptions {
        drop_floor: config.drop_floor,
        memory_cap: Some(config.memory_cap_bytes()),
        parallel: !config.single_thread,
    };
    let start = Instant::now();
    let tensor = assemble(&kernel, config.m0, &opts)?;
    let elapsed = start.elapsed();
    tensor.save(&path)?;
    println!(
        "assembled eta = {}, M0 = {}: {} stored entries in {:.2?}",
        config.eta,
        config.m0,
        tensor.len(),
        elapsed
    );
    println!(
        "dense memory bound: {:.4} GiB ({} bytes); cache file {}",
        memory_estimate(config.m0) as f64 / GIB,
        memory_estimate(config.m0),
        path.display()
    );
    Ok(())
}

fn load_tensor(config: &RunConfig) -> Result<CollisionTensor> {
    let path = config.cache_file();
    if !path.exists() {
        return Err(anyhow::Error::new(CacheMiss(format!(
            "no tensor cache at {}; run `hboltz assemble` for eta = {}, M0 = {} first",
            path.display(),
            config.eta,
            config.m0
        ))));
    }
    Ok(CollisionTensor::load_expecting(
        &path, config.eta, config.m0,
    )?)
}

/// Marker for missing-cache failures (mapped to a dedicated exit code).
#[derive(Debug)]
pub struct CacheMiss(pub String);

impl std::fmt::Display for CacheMiss {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for CacheMiss {}

fn initial_state(config: &RunConfig, m: u32) -> Result<(SpectralState, Option<BkwReference>)> {
    match &config.experiment {
        Experiment::Bkw => {
            let kernel = KernelModel::new(config.eta, config.quad_spec())?;
            let reference = BkwReference::from_kernel(&kernel)?;
            Ok((bkw_coeffs(0.0, &reference, m)?, Some(reference)))
        }
        Experiment::Bigaussian => Ok((project_bigaussian(m)?, None)),
        Experiment::Discontinuous => Ok((project_discontinuous(m, &config.quad_spec())?, None)),
        Experiment::CoefficientsFile(path) => Ok((load_coefficients(path, m)?, None)),
    }
}

fn load_coefficients(path: &Path, m: u32) -> Result<SpectralState> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading coefficients file {}", path.display()))?;
    let mut coeffs = vec![0.0; n_basis(m)];
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() || line.starts_with("k1") {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 4 {
            bail!(
                "{}:{}: expected 'k1,k2,k3,value'",
                path.display(),
                lineno + 1
            );
        }
        let idx = MultiIndex::new(fields[0].parse()?, fields[1].parse()?, fields[2].parse()?);
        if idx.degree() > m {
            bail!(
                "{}:{}: index {:?} outside I_M for M = {m}",
                path.display(),
                lineno + 1,
                idx
            );
        }
        coeffs[idx.rank()] = fields[3].parse()?;
    }
    let state = SpectralState::from_coeffs(m, coeffs)?;
    state
        .validate_normalized(1e-9)
        .map_err(|e| anyhow!("{}: {e}", path.display()))?;
    Ok(state)
}

fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

fn write_marginals(config: &RunConfig, state: &SpectralState, t: f64) -> Result<()> {
    let grid1 = grid(-6.0, 6.0, 121);
    let path1 = config.output_dir.join(format!("marginal1d_t{t:.4}.csv"));
    let g = marginal_1d(state, &grid1);
    let mut out = String::from("v1,g\n");
    for (v, gv) in grid1.iter().zip(&g) {
        out.push_str(&format!("{v:.6},{gv:.12e}\n"));
    }
    fs::write(&path1, out).with_context(|| format!("writing {}", path1.display()))?;

    let grid2 = grid(-4.0, 4.0, 41);
    let path2 = config.output_dir.join(format!("marginal2d_t{t:.4}.csv"));
    let h = marginal_2d(state, &grid2, &grid2);
    let mut out = String::from("v1,v2,h\n");
    for (i1, v1) in grid2.iter().enumerate() {
        for (i2, v2) in grid2.iter().enumerate() {
            out.push_str(&format!("{v1:.6},{v2:.6},{:.12e}\n", h[i1][i2]));
        }
    }
    fs::write(&path2, out).with_context(|| format!("writing {}", path2.display()))?;
    Ok(())
}

pub fn cmd_run(config: &RunConfig) -> Result<()> {
    fs::create_dir_all(&config.output_dir)
        .with_context(|| format!("creating output dir {}", config.output_dir.display()))?;
    let kernel = KernelModel::new(config.eta, config.quad_spec())?;
    let m_eff = config.effective_m();

    // right-hand side
    enum Rhs {
        Hybrid(HybridModel),
        Bgk(f64),
    }
    let rhs = match config.model {
        ModelKind::Bgk => {
            let tau = kernel.bgk_tau()?;
            println!("BGK relaxation time tau = {tau:.12}");
            Rhs::Bgk(tau)
        }
        ModelKind::Quadratic => {
            if config.m != config.m0 {
                println!(
                    "quadratic model integrates I_M0 (M0 = {}); requested M = {} is unused",
                    config.m0, config.m
                );
            }
            let tensor = load_tensor(config)?;
            Rhs::Hybrid(HybridModel::new(tensor, m_eff, 0.0)?)
        }
        ModelKind::Hybrid => {
            let tensor = load_tensor(config)?;
            let nu = spectral_radius(&linearized_operator(&tensor))?;
            println!("tail decay rate nu_M0 = {nu:.12}");
            Rhs::Hybrid(HybridModel::new(tensor, m_eff, nu)?)
        }
    };
    let rhs_fn = |f: &[f64]| match &rhs {
        Rhs::Hybrid(h) => h.rhs(f),
        Rhs::Bgk(tau) => Ok(bgk_rhs(*tau, f)),
    };

    let (mut state, bkw_reference) = initial_state(config, m_eff)?;

    // scaled-time column for the discontinuous experiment away from
    // Maxwell molecules
    let tau_s = if config.experiment == Experiment::Discontinuous && config.eta != 5.0 {
        let ts = kernel.scaled_time_constant()?;
        println!("time scaling constant tau_s = {ts:.6}");
        Some(ts)
    } else {
        None
    };

    let f400 = MultiIndex::new(4, 0, 0);
    let f220 = MultiIndex::new(2, 2, 0);
    let mut table = String::new();
    table.push_str(
        "t,rho,u1,u2,u3,theta,sigma11,sigma12,sigma13,sigma22,sigma23,sigma33,q1,q2,q3,f400,f220",
    );
    if tau_s.is_some() {
        table.push_str(",t_scaled");
    }
    table.push('\n');

    let mut drift = [0.0f64; 3];
    let mut bkw_dev = [0.0f64; 2];
    let mut step: u64 = 0;
    let mut pending_times: Vec<f64> = config.marginal_times.clone();

    {
        let mut observe = |t: f64, s: &SpectralState| -> hboltz_core::Result<()> {
            let sample_moments = step % config.moment_every as u64 == 0 || t >= config.t_end;
            let sample_marginals = if pending_times.is_empty() && config.marginal_times.is_empty() {
                step % config.marginal_every as u64 == 0 || t >= config.t_end
            } else if let Some(pos) = pending_times
                .iter()
                .position(|&mt| (mt - t).abs() <= 0.5 * config.dt)
            {
                pending_times.remove(pos);
                true
            } else {
                false
            };
            if sample_moments {
                let mom = moments(s);
                drift[0] = drift[0].max((mom.rho - 1.0).abs());
                drift[1] = drift[1].max(mom.u.iter().fold(0.0f64, |a, &b| a.max(b.abs())));
                drift[2] = drift[2].max((mom.theta - 1.0).abs());
                let q = mom.q.unwrap_or([0.0; 3]);
                table.push_str(&format!(
                    "{t:.6},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e}",
                    mom.rho,
                    mom.u[0],
                    mom.u[1],
                    mom.u[2],
                    mom.theta,
                    mom.sigma[0],
                    mom.sigma[1],
                    mom.sigma[2],
                    mom.sigma[3],
                    mom.sigma[4],
                    mom.sigma[5],
                    q[0],
                    q[1],
                    q[2],
                    s.coeff(f400),
                    s.coeff(f220),
                ));
                if let Some(ts) = tau_s {
                    table.push_str(&format!(",{:.6}", t / ts));
                }
                table.push('\n');
                if let Some(reference) = &bkw_reference {
                    let exact = |half_deg: f64, c: f64| {
                        let e = reference.exp_factor(t);
                        (-0.5 * e).powf(half_deg) * c
                    };
                    // f400 = [-E/2]^2 * (1-2) / 2! ; f220 = [-E/2]^2 * (1-2)
                    bkw_dev[0] = bkw_dev[0].max((s.coeff(f400) - exact(2.0, -0.5)).abs());
                    bkw_dev[1] = bkw_dev[1].max((s.coeff(f220) - exact(2.0, -1.0)).abs());
                }
            }
            if sample_marginals {
                write_marginals(config, s, t).map_err(|e| {
                    hboltz_core::Error::InternalConsistency(format!("marginal output failed: {e}"))
                })?;
            }
            step += 1;
            Ok(())
        };
        rk4_integrate(rhs_fn, &mut state, config.dt, config.t_end, &mut observe)?;
    }

    let traj_path = config.output_dir.join("trajectory.csv");
    fs::write(&traj_path, table).with_context(|| format!("writing {}", traj_path.display()))?;
    println!("trajectory written to {}", traj_path.display());
    println!(
        "conservation drift over run: |rho-1| <= {:.3e}, |u| <= {:.3e}, |theta-1| <= {:.3e}",
        drift[0], drift[1], drift[2]
    );
    if bkw_reference.is_some() {
        println!(
            "max deviation from analytic coefficients: f400 {:.3e}, f220 {:.3e}",
            bkw_dev[0], bkw_dev[1]
        );
    }
    Ok(())
}

pub fn cmd_info(config: &RunConfig) -> Result<()> {
    println!("N_M  (M  = {:>3}): {}", config.m, n_basis(config.m));
    println!("N_M0 (M0 = {:>3}): {}", config.m0, n_basis(config.m0));
    println!(
        "dense tensor estimate at M0: {:.4} GiB ({} bytes)",
        memory_estimate(config.m0) as f64 / GIB,
        memory_estimate(config.m0)
    );
    let kernel = KernelModel::new(config.eta, config.quad_spec())?;
    println!("tau_BGK(eta = {}) = {:.12}", config.eta, kernel.bgk_tau()?);
    println!(
        "tau_s(eta = {}) = {:.6}",
        config.eta,
        kernel.scaled_time_constant()?
    );
    let path = config.cache_file();
    if path.exists() {
        let tensor = CollisionTensor::load(&path)?;
        let nu = spectral_radius(&linearized_operator(&tensor))?;
        println!("nu_M0 (from cache {}) = {:.12}", path.display(), nu);
    } else {
        println!(
            "nu_M0: no tensor cache at {} (run `hboltz assemble`)",
            path.display()
        );
    }
    Ok(())
}

pub fn cmd_cache_ls(config: &RunConfig) -> Result<()> {
    let dir = &config.cache_dir;
    if !dir.exists() {
        println!("cache directory {} does not exist", dir.display());
        return Ok(());
    }
    let mut found = false;
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "bin"))
        .collect();
    paths.sort();
    for path in paths {
        match read_header(&path) {
            Ok(h) => {
                let size = fs::metadata(&path).map(|m| m.len()).unwrap_or(0);
                println!(
                    "{}: eta = {}, M0 = {}, {} entries, drop floor {:.1e}, {} bytes",
                    path.display(),
                    h.eta,
                    h.m0,
                    h.entry_count,
                    h.drop_floor,
                    size
                );
                found = true;
            }
            Err(e) => println!("{}: unreadable ({e})", path.display()),
        }
    }
    if !found {
        println!("no tensor caches in {}", dir.display());
    }
    Ok(())
}

pub fn cmd_cache_rm(config: &RunConfig, all: bool) -> Result<()> {
    if !all {
        let path = config.cache_file();
        if path.exists() {
            fs::remove_file(&path)?;
            println!("removed {}", path.display());
        } else {
            println!("nothing to remove at {}", path.display());
        }
        return Ok(());
    }
    let dir = &config.cache_dir;
    if !dir.exists() {
        println!("cache directory {} does not exist", dir.display());
        return Ok(());
    }
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        if path.extension().is_some_and(|x| x == "bin") && read_header(&path).is_ok() {
            fs::remove_file(&path)?;
            println!("removed {}", path.display());
        }
    }
    Ok(())
}
