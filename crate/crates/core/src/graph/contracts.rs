//! Building a co-occurrence graph from dated contract records.
//!
//! Two persons are linked when they appear in the same contract, or in two
//! different contracts less than `window_years` apart that name the same
//! (non-excluded) lord or the same notary. Each piece of evidence adds 1 to
//! the pair weight.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Read;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::WeightedGraph;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Peasant,
    Noble,
    Notary,
}

impl FromStr for Role {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "peasant" => Ok(Role::Peasant),
            "noble" => Ok(Role::Noble),
            "notary" => Ok(Role::Notary),
            other => Err(format!("unknown role `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContractRecord {
    pub contract_id: String,
    pub date: i32,
    pub lord: Option<String>,
    pub notary: Option<String>,
    pub persons: Vec<String>,
    /// Parallel to `persons`.
    pub person_roles: Vec<Role>,
}

impl ContractRecord {
    /// Record whose persons are all peasants.
    pub fn new(id: &str, date: i32, lord: Option<&str>, notary: Option<&str>, persons: &[&str]) -> Self {
        Self {
            contract_id: id.to_string(),
            date,
            lord: lord.map(str::to_string),
            notary: notary.map(str::to_string),
            persons: persons.iter().map(|p| p.to_string()).collect(),
            person_roles: vec![Role::Peasant; persons.len()],
        }
    }

    pub fn with_roles(mut self, roles: &[Role]) -> Self {
        self.person_roles = roles.to_vec();
        self
    }

    pub fn validate(&self, date_range: (i32, i32)) -> Result<()> {
        let fail = |message: String| Error::InvalidRecord { contract: self.contract_id.clone(), message };
        if self.persons.is_empty() {
            return Err(fail("no persons".into()));
        }
        if self.persons.len() != self.person_roles.len() {
            return Err(fail(format!(
                "{} persons but {} roles",
                self.persons.len(),
                self.person_roles.len()
            )));
        }
        if self.persons.iter().any(|p| p.trim().is_empty()) {
            return Err(fail("empty person label".into()));
        }
        if self.date < date_range.0 || self.date > date_range.1 {
            return Err(fail(format!(
                "date {} outside plausible range {}..={}",
                self.date, date_range.0, date_range.1
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct ContractOptions {
    pub date_range: (i32, i32),
}

impl Default for ContractOptions {
    fn default() -> Self {
        Self { date_range: (1000, 2000) }
    }
}

#[derive(Debug, Deserialize)]
struct ContractRow {
    contract_id: String,
    date: String,
    lord: String,
    notary: String,
    persons: String,
    roles: String,
}

fn optional(s: &str) -> Option<String> {
    let s = s.trim();
    (!s.is_empty()).then(|| s.to_string())
}

/// Reads the `contract_id,date,lord,notary,persons,roles` CSV layout.
/// `persons` and `roles` are `;`-separated parallel lists; an empty `roles`
/// field marks everyone as a peasant.
pub fn load_contracts<R: Read>(source: R, options: &ContractOptions) -> Result<Vec<ContractRecord>> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(source);
    let mut records = Vec::new();
    for (idx, row) in reader.deserialize::<ContractRow>().enumerate() {
        // header is line 1
        let line = idx + 2;
        let row = row?;
        let date = row.date.parse::<i32>().map_err(|e| Error::Parse {
            line,
            message: format!("bad date `{}`: {e}", row.date),
        })?;
        let persons: Vec<String> =
            row.persons.split(';').map(str::trim).filter(|p| !p.is_empty()).map(String::from).collect();
        let person_roles = if row.roles.trim().is_empty() {
            vec![Role::Peasant; persons.len()]
        } else {
            row.roles
                .split(';')
                .map(|r| r.parse::<Role>().map_err(|message| Error::Parse { line, message }))
                .collect::<Result<Vec<_>>>()?
        };
        let record = ContractRecord {
            contract_id: row.contract_id,
            date,
            lord: optional(&row.lord),
            notary: optional(&row.notary),
            persons,
            person_roles,
        };
        record.validate(options.date_range)?;
        records.push(record);
    }
    Ok(records)
}

#[derive(Debug, Clone)]
pub struct ContractGraphConfig {
    /// Strict bound: dates must differ by less than this many years.
    pub window_years: i64,
    /// Lords ignored by the shared-lord rule.
    pub excluded_lords: BTreeSet<String>,
    /// Persons holding any of these roles in any record are removed.
    pub drop_roles: BTreeSet<Role>,
}

impl Default for ContractGraphConfig {
    fn default() -> Self {
        Self {
            window_years: 15,
            excluded_lords: BTreeSet::new(),
            drop_roles: [Role::Noble, Role::Notary].into_iter().collect(),
        }
    }
}

fn ordered<'a>(a: &'a str, b: &'a str) -> (&'a str, &'a str) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Builds the full co-occurrence graph. Vertices are ordered by label so
/// the result does not depend on record order.
pub fn build_from_contracts(records: &[ContractRecord], config: &ContractGraphConfig) -> Result<WeightedGraph> {
    if records.is_empty() {
        return Err(Error::EmptyRecords);
    }
    if config.window_years < 0 {
        return Err(Error::InvalidParameter(format!("window_years = {} is negative", config.window_years)));
    }
    for r in records {
        if r.persons.len() != r.person_roles.len() {
            return Err(Error::InvalidRecord {
                contract: r.contract_id.clone(),
                message: "persons and roles differ in length".into(),
            });
        }
    }

    let dropped: BTreeSet<&str> = records
        .iter()
        .flat_map(|r| r.persons.iter().zip(&r.person_roles))
        .filter(|(_, role)| config.drop_roles.contains(role))
        .map(|(p, _)| p.as_str())
        .collect();

    // Canonical record order: (date, id, persons) makes the scan independent
    // of input order.
    let mut kept: Vec<(&ContractRecord, Vec<&str>)> = records
        .iter()
        .map(|r| {
            let people: BTreeSet<&str> =
                r.persons.iter().map(String::as_str).filter(|p| !dropped.contains(p)).collect();
            (r, people.into_iter().collect())
        })
        .collect();
    kept.sort_by(|a, b| (a.0.date, &a.0.contract_id, &a.1).cmp(&(b.0.date, &b.0.contract_id, &b.1)));

    let labels: BTreeSet<&str> = kept.iter().flat_map(|(_, p)| p.iter().copied()).collect();
    let mut weights: BTreeMap<(&str, &str), u64> = BTreeMap::new();

    for (_, people) in &kept {
        for (i, &p) in people.iter().enumerate() {
            for &q in &people[i + 1..] {
                *weights.entry(ordered(p, q)).or_default() += 1;
            }
        }
    }

    for (i, (ra, pa)) in kept.iter().enumerate() {
        for (rb, pb) in &kept[i + 1..] {
            if (i64::from(ra.date) - i64::from(rb.date)).abs() >= config.window_years {
                continue;
            }
            let same_lord = matches!((&ra.lord, &rb.lord), (Some(a), Some(b))
                if a == b && !config.excluded_lords.contains(a));
            let same_notary = matches!((&ra.notary, &rb.notary), (Some(a), Some(b)) if a == b);
            if !(same_lord || same_notary) {
                continue;
            }
            let mut pairs = BTreeSet::new();
            for &p in pa {
                for &q in pb {
                    if p != q {
                        pairs.insert(ordered(p, q));
                    }
                }
            }
            for pair in pairs {
                *weights.entry(pair).or_default() += 1;
            }
        }
    }

    let mut g = WeightedGraph::new();
    for l in &labels {
        g.add_vertex(l);
    }
    for (n, ((a, b), w)) in weights.into_iter().enumerate() {
        let (ia, ib) = (g.position_of(a)?, g.position_of(b)?);
        g.add_weight(ia, ib, w as f64, n + 1)?;
    }
    Ok(g)
}
