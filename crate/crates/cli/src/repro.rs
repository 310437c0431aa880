//! Re-runs the worked examples of the virus scenario and prints each
//! published figure next to the exactly recomputed value.

use adl_core::consistency::{check_consistency, query_bound, Direction, SolveConfig};
use adl_core::kb::{kb_satisfied_by, KnowledgeBase};
use adl_core::learning::{aggregate, concept_extension, concept_learn, role_update, Observation};
use adl_core::rational::{parse_q, q, to_decimal, to_f64};
use adl_core::syntax::ID_ROLE;
use adl_core::{evaluate, parse_formula, BeliefModel, Error, PointedModel, Q};

const VIRUS_MODEL: &str = include_str!("../../../fixtures/virus.adm");
const VIRUS_KB: &str = include_str!("../../../fixtures/virus.akb");

/// One comparison row.
struct Row {
    label: String,
    published: String,
    oracle: Q,
    tol: f64,
    known: bool,
}

impl Row {
    fn render(&self) -> String {
        let matches = match parse_q(&self.published) {
            Ok(p) => (to_f64(&p) - to_f64(&self.oracle)).abs() <= self.tol,
            Err(_) => false,
        };
        let status = match (matches, self.known) {
            (true, _) => "match".to_string(),
            (false, true) => "DISCREPANCY (known)".to_string(),
            (false, false) => "DISCREPANCY".to_string(),
        };
        format!("{:<44} published {:<6} oracle {:<24} {status}", self.label, self.published, format!("{} ({})", self.oracle, to_decimal(&self.oracle, 4)))
    }
}

fn row(label: &str, published: &str, oracle: Q, tol: f64, known: bool) -> Row {
    Row { label: label.to_string(), published: published.to_string(), oracle, tol, known }
}

fn eval_at(m: &BeliefModel, at: &str, formula: &str) -> Result<Q, Error> {
    let pm = PointedModel::at(m.clone(), at)?;
    let f = parse_formula(formula, Some(&pm.model.signature()))?.desugar();
    evaluate(&pm, &f)
}

/// All comparisons, as printable lines.
pub fn run(seed: u64) -> Result<Vec<String>, Error> {
    let virus = BeliefModel::parse_valid(VIRUS_MODEL)?;
    let mut rows = Vec::new();
    let mut lines = vec!["# Virus scenario: published figures versus exact recomputation".to_string()];

    // Conditional fever-virus marginal and exposure.
    let cond = eval_at(&virus, "H0", "[V|F]_c")?;
    rows.push(row("[V|F]_c at H0", "0.78", cond, 0.005, true));
    let exposure = eval_at(&virus, "H0", "E_id (!V & [V|F]_c)")?;
    rows.push(row("exposure E_id(!V & [V|F]_c) at Hector", "0.7", exposure, 0.005, true));

    // Role learning after a contact tests positive.
    let mut m = virus.clone();
    m.add_concept("FP");
    for i in 0..m.len() {
        m.set_likelihood("FP", i, q(1, 10));
    }
    let pm = PointedModel::at(m.clone(), "H0")?;
    let obs = parse_formula("[(FP ? top : V) | top]_c", Some(&m.signature()))?.desugar();
    let up = role_update(&pm, &Observation::from_formula(&obs)?, false)?;
    let w = |to: &str| -> Result<Q, Error> { Ok(up.model.weight("c", pm.point, up.model.index_of(to)?)) };
    let (i0, i1, j0, j1) = (w("I0")?, w("I1")?, w("J0")?, w("J1")?);
    let igor = &i0 + &i1;
    let julia = &j0 + &j1;
    rows.push(row("posterior contact mass Julia", "0.75", julia.clone(), 0.005, true));
    rows.push(row("posterior contact mass Igor", "0.25", igor.clone(), 0.005, true));
    rows.push(row("Igor id split (I0)", "0.1", &i0 / &igor, 0.005, true));
    rows.push(row("Igor id split (I1)", "0.9", &i1 / &igor, 0.005, true));
    rows.push(row("Julia id split (J0)", "0.05", &j0 / &julia, 0.005, true));
    rows.push(row("Julia id split (J1)", "0.95", &j1 / &julia, 0.005, true));

    // Concept extension and aggregation.
    let mut single = BeliefModel::new(&["H0"])?;
    single.add_concept("F");
    single.set_likelihood("F", 0, q(3, 5));
    let (ext, star) = concept_extension(&PointedModel::new(single, 0)?, "F")?;
    rows.push(row("extension F(H0)", "0.84", ext.likelihood("F", 0), 1e-9, false));
    rows.push(row("extension F(H0*)", "0.36", ext.likelihood("F", star), 1e-9, false));
    let mut weighted = ext.clone();
    weighted.set_row(ID_ROLE, 0, vec![q(42, 100), q(58, 100)]);
    let agg = aggregate(&weighted, 0, star)?;
    rows.push(row("aggregate with weights (0.42, 0.58)", "0.56", agg.likelihood("F", 0), 0.005, false));

    // Concept learning scenario of the figure.
    let mut fig = BeliefModel::new(&["H0", "J0", "J1"])?;
    fig.add_concept("F");
    for (k, p) in [q(3, 5), q(9, 10), q(1, 5)].into_iter().enumerate() {
        fig.set_likelihood("F", k, p);
    }
    fig.add_role("c");
    fig.set_row("c", 0, vec![q(0, 1), q(4, 5), q(1, 5)]);
    fig.set_row("c", 1, vec![q(1, 1), q(0, 1), q(0, 1)]);
    fig.set_row("c", 2, vec![q(1, 1), q(0, 1), q(0, 1)]);
    let obs = parse_formula("(F ? E_c F : E_c !F)", Some(&fig.signature()))?.desugar();
    let learnt = concept_learn(&PointedModel::new(fig, 0)?, "F", &obs)?;
    rows.push(row("concept learning: observation at H0", "0.4", learnt.evidence.0.clone(), 0.005, true));
    rows.push(row("concept learning: observation at H0*", "0.55", learnt.evidence.1.clone(), 0.005, true));
    rows.push(row("concept learning: posterior id weight H0", "0.42", learnt.weights.0.clone(), 0.005, true));
    rows.push(row("concept learning: posterior id weight H0*", "0.58", learnt.weights.1.clone(), 0.005, true));
    rows.push(row("concept learning: learnt F(H0)", "0.56", learnt.model.likelihood("F", 0), 0.005, true));

    lines.extend(rows.iter().map(Row::render));

    // Knowledge base of the scenario.
    let kb = KnowledgeBase::parse(VIRUS_KB)?;
    let mut with_exp = virus.clone();
    with_exp.add_concept("exp");
    for i in 0..with_exp.len() {
        with_exp.set_likelihood("exp", i, q(1, 1));
    }
    let violations = kb_satisfied_by(&with_exp, &kb)?;
    lines.push(format!(
        "{:<44} published satisfied  oracle {} violation(s){}",
        "scenario model with exp = 1 against the KB",
        violations.len(),
        if violations.is_empty() { String::new() } else { "  DISCREPANCY (known)".to_string() }
    ));
    for v in &violations {
        lines.push(format!("    {v}"));
    }
    let cfg = SolveConfig { seed, ..SolveConfig::default() };
    lines.push(format!("{:<44} {}", "KB consistency", check_consistency(&kb, &cfg)?));
    let exp = adl_core::Formula::atom("exp");
    lines.push(format!(
        "{:<44} {}",
        "query Hector exp = 0.25",
        query_bound(&kb, "Hector", &exp, q(1, 4), Direction::Exactly, &cfg)?
    ));
    Ok(lines)
}
