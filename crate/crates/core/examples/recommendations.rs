//! Mitigation suggestions for every Medium or High month of the 2025 plan.

use bgrisk::ingest::parse_plan_csv;
use bgrisk::risk::{build_plan, recommend, score_plan, ActionBounds, ScoringConfig};
use bgrisk::{RiskLevel, Thresholds};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures/reference_plan_2025.csv");
    let plan = parse_plan_csv(std::fs::File::open(path)?)?;
    let scored = score_plan(&build_plan(None, &plan, &ScoringConfig::default())?)?;

    let thresholds = Thresholds::default();
    let strict = ActionBounds {
        allow_freshness: false,
        ..ActionBounds::default()
    };
    for r in scored.iter().filter(|r| r.risk_level != RiskLevel::Low) {
        let rec = recommend(r, &ActionBounds::default(), &thresholds)?;
        let alt = recommend(r, &strict, &thresholds)?;
        let show = |actions: &[bgrisk::risk::Action]| {
            if actions.is_empty() {
                "nothing within bounds".to_string()
            } else {
                actions.iter().map(ToString::to_string).collect::<Vec<_>>().join(" + ")
            }
        };
        println!(
            "{} {} {:.3} -> {:.3}: {} | without freshness: {}",
            r.plan.month.short_name(),
            r.risk_level,
            r.risk_score.value(),
            rec.resulting_score.value(),
            show(&rec.actions),
            show(&alt.actions)
        );
    }
    Ok(())
}
