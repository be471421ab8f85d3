//! Synthetic multi-generation populations with known ground truth.
//!
//! Lifespans mix an infant-mortality mass at ages 0–1 with an adult component
//! `mode + spread * X`, where `X` is a standardized left-skewed draw (the
//! shape parameter controls the skew). Generation g < generations-1 adults
//! marry a freshly created spouse whose standardized component is
//! `rho * x_partner + sqrt(1-rho^2) * fresh`, so founder-couple lifespans
//! correlate at exactly `spouse_corr`. Children draw a fresh base lifespan
//! plus `parent_child_slope * (midparent - base mean)`, so regressing child
//! age on midparent age recovers the configured slope. Infants never marry or
//! breed, and adult ages are clipped to [5, 122], so a generated population
//! passes cleaning with zero removals when nothing is masked.

use crate::date::{civil_from_days, days_from_civil, PartialDate, DAYS_PER_YEAR};
use crate::profile::{Gender, ProfileRecord};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Poisson};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("invalid config: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthConfig {
    /// Family lines in generation zero.
    pub founders: u32,
    /// Total generations, counting the founders (1 = founders only, no links).
    pub generations: u32,
    /// Probability of death at ages 0–1.
    pub infant_mortality: f64,
    /// Mode of the adult lifespan component, in years.
    pub adult_mode: f64,
    /// Spread of the adult lifespan component, in years.
    pub adult_spread: f64,
    /// Skew-normal shape of the adult draw (negative = left tail).
    pub adult_skew: f64,
    /// Target regression slope of child age on midparent age.
    pub parent_child_slope: f64,
    /// Target lifespan correlation within a couple.
    pub spouse_corr: f64,
    /// Mean children per couple (Poisson).
    pub mean_children: f64,
    /// Probability that a breeding adult takes a second (childless) spouse.
    pub remarriage_rate: f64,
    /// Per-field masking probability (dates, locations, gender).
    pub missing_rate: f64,
    /// Founders are born uniformly in `[birth_year_start, birth_year_start + birth_year_span]`.
    pub birth_year_start: i32,
    pub birth_year_span: i32,
    /// Emitted as every profile's birth location when set.
    pub birth_location: Option<String>,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            founders: 100,
            generations: 3,
            infant_mortality: 0.08,
            adult_mode: 70.0,
            adult_spread: 12.0,
            adult_skew: -3.0,
            parent_child_slope: 0.0,
            spouse_corr: 0.0,
            mean_children: 2.0,
            remarriage_rate: 0.05,
            missing_rate: 0.0,
            birth_year_start: 1700,
            birth_year_span: 40,
            birth_location: None,
            seed: 0,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<(), SynthError> {
        let fail = |m: &str| Err(SynthError::InvalidConfig(m.to_string()));
        if self.founders == 0 {
            return fail("founders must be at least 1");
        }
        if self.generations == 0 {
            return fail("generations must be at least 1");
        }
        if !(0.0..1.0).contains(&self.infant_mortality) {
            return fail("infant_mortality must be in [0, 1)");
        }
        if !(-1.0..1.0).contains(&self.spouse_corr) || self.spouse_corr <= -1.0 {
            return fail("spouse_corr must be in (-1, 1)");
        }
        if self.mean_children <= 0.0 {
            return fail("mean_children must be positive");
        }
        if self.adult_spread <= 0.0 {
            return fail("adult_spread must be positive");
        }
        if !(0.0..=1.0).contains(&self.missing_rate) {
            return fail("missing_rate must be in [0, 1]");
        }
        if !(0.0..=1.0).contains(&self.remarriage_rate) {
            return fail("remarriage_rate must be in [0, 1]");
        }
        if self.birth_year_span < 0 {
            return fail("birth_year_span must be non-negative");
        }
        if self.birth_year_start < 1 || self.birth_year_start + self.birth_year_span > 9000 {
            return fail("birth year range out of bounds");
        }
        Ok(())
    }
}

const ADULT_MIN_AGE: f64 = 5.0;
const ADULT_MAX_AGE: f64 = 122.0;

struct Person {
    gender: Gender,
    birth_day: i64,
    lifespan: f64,
    /// Standardized adult component, absent for infant deaths.
    adult_x: Option<f64>,
    parents: Option<(usize, usize)>,
    spouses: Vec<usize>,
    children: Vec<usize>,
}

struct Sampler {
    rng: ChaCha8Rng,
    normal: Normal<f64>,
    delta: f64,
    skew_mean: f64,
    skew_sd: f64,
}

impl Sampler {
    fn new(cfg: &SynthConfig) -> Self {
        let alpha = cfg.adult_skew;
        let delta = alpha / (1.0 + alpha * alpha).sqrt();
        let skew_mean = delta * (2.0 / std::f64::consts::PI).sqrt();
        let skew_sd = (1.0 - 2.0 * delta * delta / std::f64::consts::PI).sqrt();
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(cfg.seed),
            normal: Normal::new(0.0, 1.0).expect("unit normal"),
            delta,
            skew_mean,
            skew_sd,
        }
    }

    /// Standardized (mean 0, variance 1) skew-normal draw.
    fn skew_unit(&mut self) -> f64 {
        let z0: f64 = self.normal.sample(&mut self.rng);
        let z1: f64 = self.normal.sample(&mut self.rng);
        let x = self.delta * z0.abs() + (1.0 - self.delta * self.delta).sqrt() * z1;
        (x - self.skew_mean) / self.skew_sd
    }
}

/// Generates the population as profile records in creation order;
/// deterministic for a given config.
pub fn generate_population(cfg: &SynthConfig) -> Result<Vec<ProfileRecord>, SynthError> {
    cfg.validate()?;
    let mut s = Sampler::new(cfg);
    let mut people: Vec<Person> = Vec::new();

    // The mean of the base lifespan law, the anchor for the heritability shift.
    let base_mean = (1.0 - cfg.infant_mortality) * cfg.adult_mode + cfg.infant_mortality * 1.0;

    let adult_lifespan = |x: f64, cfg: &SynthConfig| -> f64 {
        (cfg.adult_mode + cfg.adult_spread * x).clamp(ADULT_MIN_AGE, ADULT_MAX_AGE)
    };

    let mut current: Vec<usize> = Vec::with_capacity(cfg.founders as usize);
    for _ in 0..cfg.founders {
        let gender = if s.rng.random_bool(0.5) { Gender::Male } else { Gender::Female };
        let year = cfg.birth_year_start + s.rng.random_range(0..=cfg.birth_year_span);
        let birth_day = random_birth_day(&mut s.rng, year);
        let (lifespan, adult_x) = if s.rng.random_bool(cfg.infant_mortality) {
            (s.rng.random_range(0.0..2.0), None)
        } else {
            let x = s.skew_unit();
            (adult_lifespan(x, cfg), Some(x))
        };
        current.push(people.len());
        people.push(Person {
            gender,
            birth_day,
            lifespan,
            adult_x,
            parents: None,
            spouses: Vec::new(),
            children: Vec::new(),
        });
    }

    let poisson = Poisson::new(cfg.mean_children).expect("positive mean");
    for _generation in 1..cfg.generations {
        let mut next: Vec<usize> = Vec::new();
        for ix in current {
            if people[ix].adult_x.is_none() {
                continue; // infant deaths do not marry or breed
            }
            // Married-in spouse: opposite gender, nearby birth year, adult
            // lifespan correlated with the partner's at spouse_corr.
            let spouse_gender = match people[ix].gender {
                Gender::Female => Gender::Male,
                _ => Gender::Female,
            };
            let spouse_year = year_of_day(people[ix].birth_day) + s.rng.random_range(-5..=5);
            let spouse_birth_day = random_birth_day(&mut s.rng, spouse_year.max(1));
            let rho = cfg.spouse_corr;
            let partner_x = people[ix].adult_x.expect("adult checked");
            let spouse_x = rho * partner_x + (1.0 - rho * rho).sqrt() * s.skew_unit();
            let spouse_ix = people.len();
            people.push(Person {
                gender: spouse_gender,
                birth_day: spouse_birth_day,
                lifespan: adult_lifespan(spouse_x, cfg),
                adult_x: Some(spouse_x),
                parents: None,
                spouses: vec![ix],
                children: Vec::new(),
            });
            people[ix].spouses.push(spouse_ix);

            let midparent = (people[ix].lifespan + people[spouse_ix].lifespan) / 2.0;
            let shift = cfg.parent_child_slope * (midparent - base_mean);
            let n_children = poisson.sample(&mut s.rng) as usize;
            let parent_year = year_of_day(people[ix].birth_day).max(year_of_day(spouse_birth_day));
            for _ in 0..n_children {
                let gender = if s.rng.random_bool(0.5) { Gender::Male } else { Gender::Female };
                let year = parent_year + s.rng.random_range(20..=45);
                let birth_day = random_birth_day(&mut s.rng, year);
                let (lifespan, adult_x) = if s.rng.random_bool(cfg.infant_mortality) {
                    (s.rng.random_range(0.0..2.0), None)
                } else {
                    let x = s.skew_unit();
                    let age = (cfg.adult_mode + cfg.adult_spread * x + shift)
                        .clamp(ADULT_MIN_AGE, ADULT_MAX_AGE);
                    ((age), Some((age - cfg.adult_mode) / cfg.adult_spread))
                };
                let child_ix = people.len();
                people.push(Person {
                    gender,
                    birth_day,
                    lifespan,
                    adult_x,
                    parents: Some((ix, spouse_ix)),
                    spouses: Vec::new(),
                    children: Vec::new(),
                });
                people[ix].children.push(child_ix);
                people[spouse_ix].children.push(child_ix);
                next.push(child_ix);
            }
            // Childless later marriages, geometric in the remarriage rate;
            // lifespans correlate the same way as the first spouse's.
            let mut later = 0;
            while later < 3 && cfg.remarriage_rate > 0.0 && s.rng.random_bool(cfg.remarriage_rate) {
                let year = year_of_day(people[ix].birth_day) + s.rng.random_range(-5..=5);
                let birth_day = random_birth_day(&mut s.rng, year.max(1));
                let x = rho * partner_x + (1.0 - rho * rho).sqrt() * s.skew_unit();
                let later_ix = people.len();
                people.push(Person {
                    gender: spouse_gender,
                    birth_day,
                    lifespan: adult_lifespan(x, cfg),
                    adult_x: Some(x),
                    parents: None,
                    spouses: vec![ix],
                    children: Vec::new(),
                });
                people[ix].spouses.push(later_ix);
                later += 1;
            }
        }
        current = next;
    }

    // Finalize records; masking draws happen in creation order.
    let id_of = |ix: usize| format!("p{ix:08}");
    let mut records = Vec::with_capacity(people.len());
    for (ix, person) in people.iter().enumerate() {
        let death_day = person.birth_day + (person.lifespan * DAYS_PER_YEAR).round() as i64;
        let mut record = ProfileRecord::new(id_of(ix));
        record.full_name = format!("Person {ix}");
        record.gender = person.gender;
        record.birth = PartialDate::from_day_number(person.birth_day);
        record.death = PartialDate::from_day_number(death_day);
        record.birth_location = cfg.birth_location.clone();
        if let Some((a, b)) = person.parents {
            record.parent_ids = vec![id_of(a), id_of(b)];
            // Siblings: co-children of the same couple.
            record.sibling_ids = people[a]
                .children
                .iter()
                .filter(|&&c| c != ix)
                .map(|&c| id_of(c))
                .collect();
        }
        record.child_ids = person.children.iter().map(|&c| id_of(c)).collect();
        record.spouse_ids = person.spouses.iter().map(|&s| id_of(s)).collect();

        if cfg.missing_rate > 0.0 {
            if s.rng.random_bool(cfg.missing_rate) {
                record.birth = None;
            }
            if s.rng.random_bool(cfg.missing_rate) {
                record.death = None;
            }
            if s.rng.random_bool(cfg.missing_rate) {
                record.gender = Gender::Unknown;
            }
            if record.birth_location.is_some() && s.rng.random_bool(cfg.missing_rate) {
                record.birth_location = None;
            }
        }
        records.push(record);
    }
    Ok(records)
}

fn year_of_day(day: i64) -> i32 {
    civil_from_days(day).0
}

fn random_birth_day(rng: &mut ChaCha8Rng, year: i32) -> i64 {
    let start = days_from_civil(year, 1, 1);
    let end = days_from_civil(year + 1, 1, 1);
    rng.random_range(start..end)
}
