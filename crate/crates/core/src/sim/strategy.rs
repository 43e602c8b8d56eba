use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{ensure, Error, Result};
use crate::model::NetworkParams;

/// Decides how much of the not-yet-stashed part of a request the stash
/// downloads over its own cellular link.
pub trait SplitStrategy: Send + Sync + fmt::Debug {
    /// Spec string that rebuilds this strategy through the registry.
    fn spec(&self) -> String;

    /// Stash share, as a fraction of the whole item, of a `remaining`
    /// fraction still to be fetched. Must lie in `[0, remaining]`.
    fn split(&self, remaining: f64, net: &NetworkParams) -> f64;
}

#[derive(Debug)]
pub struct FixedSplit(pub f64);

impl SplitStrategy for FixedSplit {
    fn spec(&self) -> String {
        format!("fixed:{}", self.0)
    }

    fn split(&self, remaining: f64, _: &NetworkParams) -> f64 {
        self.0.min(remaining)
    }
}

/// Equalizes the two cellular legs of the remaining portion.
#[derive(Debug)]
pub struct OptimalPerRequest;

impl SplitStrategy for OptimalPerRequest {
    fn spec(&self) -> String {
        "optimal".into()
    }

    fn split(&self, remaining: f64, net: &NetworkParams) -> f64 {
        remaining * net.omega_b / (net.omega_u + net.omega_b)
    }
}

#[derive(Debug)]
pub struct NoStash;

impl SplitStrategy for NoStash {
    fn spec(&self) -> String {
        "no-stash".into()
    }

    fn split(&self, _: f64, _: &NetworkParams) -> f64 {
        0.0
    }
}

#[derive(Debug)]
pub struct AllStash;

impl SplitStrategy for AllStash {
    fn spec(&self) -> String {
        "all-stash".into()
    }

    fn split(&self, remaining: f64, _: &NetworkParams) -> f64 {
        remaining
    }
}

/// Builds a strategy from the argument after `:` in its spec, if any.
pub type StrategyBuilder = fn(Option<&str>) -> Result<Arc<dyn SplitStrategy>>;

/// Split strategies by name. Specs are `name` or `name:arg`.
#[derive(Clone)]
pub struct StrategyRegistry {
    builders: BTreeMap<String, StrategyBuilder>,
}

fn no_arg(name: &str, arg: Option<&str>) -> Result<()> {
    match arg {
        None => Ok(()),
        Some(a) => Err(Error::domain("split strategy", format!("`{name}` takes no argument, got `{a}`"))),
    }
}

impl Default for StrategyRegistry {
    fn default() -> Self {
        let mut r = StrategyRegistry {
            builders: BTreeMap::new(),
        };
        r.register("fixed", |arg| {
            let arg = arg.ok_or_else(|| Error::domain("split strategy", "`fixed` needs a ratio, e.g. fixed:0.5"))?;
            let x: f64 = arg
                .trim()
                .parse()
                .map_err(|_| Error::domain("split ratio", format!("`{arg}` is not a number")))?;
            ensure((0.0..=1.0).contains(&x), "split ratio", || format!("fixed:{x} outside [0, 1]"))?;
            Ok(Arc::new(FixedSplit(x)))
        });
        r.register("optimal", |arg| {
            no_arg("optimal", arg)?;
            Ok(Arc::new(OptimalPerRequest))
        });
        r.register("no-stash", |arg| {
            no_arg("no-stash", arg)?;
            Ok(Arc::new(NoStash))
        });
        r.register("all-stash", |arg| {
            no_arg("all-stash", arg)?;
            Ok(Arc::new(AllStash))
        });
        r
    }
}

impl StrategyRegistry {
    pub fn register(&mut self, name: &str, builder: StrategyBuilder) {
        self.builders.insert(name.to_string(), builder);
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.builders.keys().map(String::as_str)
    }

    pub fn build(&self, spec: &str) -> Result<Arc<dyn SplitStrategy>> {
        let (name, arg) = match spec.split_once(':') {
            Some((n, a)) => (n.trim(), Some(a)),
            None => (spec.trim(), None),
        };
        let builder = self
            .builders
            .get(name)
            .ok_or_else(|| Error::UnknownStrategy(spec.to_string()))?;
        builder(arg)
    }
}

/// A strategy plus the optional floor and ceiling the server advertises,
/// both relative to the remaining portion.
#[derive(Clone, Debug)]
pub struct SplitPolicy {
    pub strategy: Arc<dyn SplitStrategy>,
    pub x_min: Option<f64>,
    pub x_max: Option<f64>,
}

impl SplitPolicy {
    pub fn new(strategy: Arc<dyn SplitStrategy>) -> Self {
        SplitPolicy {
            strategy,
            x_min: None,
            x_max: None,
        }
    }

    /// Builds from a spec string with the default registry.
    pub fn parse(spec: &str) -> Result<Self> {
        Ok(Self::new(StrategyRegistry::default().build(spec)?))
    }

    pub fn with_bounds(mut self, x_min: Option<f64>, x_max: Option<f64>) -> Result<Self> {
        self.x_min = x_min;
        self.x_max = x_max;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let lo = self.x_min.unwrap_or(0.0);
        let hi = self.x_max.unwrap_or(1.0);
        ensure(0.0 <= lo && lo <= hi && hi <= 1.0, "split bounds", || {
            format!("need 0 <= x_min <= x_max <= 1, got {:?} / {:?}", self.x_min, self.x_max)
        })
    }

    pub fn spec(&self) -> String {
        self.strategy.spec()
    }

    /// Stash share of the `remaining` fraction, clamped into the advertised
    /// bounds and never more than `remaining`.
    pub fn resolve(&self, remaining: f64, net: &NetworkParams) -> f64 {
        let mut x = self.strategy.split(remaining, net);
        if let Some(lo) = self.x_min {
            x = x.max(lo * remaining);
        }
        if let Some(hi) = self.x_max {
            x = x.min(hi * remaining);
        }
        x.clamp(0.0, remaining)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::kbps;

    fn net() -> NetworkParams {
        NetworkParams::new(kbps(500.0), kbps(800.0), 0.75).unwrap()
    }

    #[test]
    fn resolve_examples() {
        let opt = SplitPolicy::parse("optimal").unwrap();
        assert!((opt.resolve(1.0, &net()) - 0.6154).abs() < 5e-4);
        assert_eq!(SplitPolicy::parse("no-stash").unwrap().resolve(0.7, &net()), 0.0);
        assert_eq!(SplitPolicy::parse("all-stash").unwrap().resolve(0.7, &net()), 0.7);
        assert_eq!(SplitPolicy::parse("fixed:0.8").unwrap().resolve(0.5, &net()), 0.5);
    }

    #[test]
    fn bounds_clamp_relative_to_remaining() {
        let p = SplitPolicy::parse("no-stash").unwrap().with_bounds(Some(0.2), None).unwrap();
        assert!((p.resolve(0.5, &net()) - 0.1).abs() < 1e-15);
        let p = SplitPolicy::parse("all-stash").unwrap().with_bounds(None, Some(0.5)).unwrap();
        assert_eq!(p.resolve(0.8, &net()), 0.4);
        assert!(SplitPolicy::parse("optimal").unwrap().with_bounds(Some(0.6), Some(0.4)).is_err());
    }

    #[test]
    fn registry_round_trips_specs() {
        let reg = StrategyRegistry::default();
        for spec in ["fixed:0.25", "optimal", "no-stash", "all-stash"] {
            assert_eq!(reg.build(spec).unwrap().spec(), spec);
        }
        assert!(matches!(reg.build("greedy"), Err(Error::UnknownStrategy(_))));
        assert!(reg.build("fixed").is_err());
        assert!(reg.build("fixed:1.5").is_err());
        assert!(reg.build("optimal:3").is_err());
    }

    #[test]
    fn custom_strategies_can_be_registered() {
        #[derive(Debug)]
        struct Half;
        impl SplitStrategy for Half {
            fn spec(&self) -> String {
                "half".into()
            }
            fn split(&self, remaining: f64, _: &NetworkParams) -> f64 {
                remaining / 2.0
            }
        }
        let mut reg = StrategyRegistry::default();
        reg.register("half", |_| Ok(Arc::new(Half)));
        assert_eq!(SplitPolicy::new(reg.build("half").unwrap()).resolve(0.6, &net()), 0.3);
        assert!(reg.names().any(|n| n == "half"));
    }
}
