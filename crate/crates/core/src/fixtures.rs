//! Small reference relations used by the documentation, tests and CLI demos.

use crate::model::Relation;

/// Five dwellings rated on price (P), distance to work (E), energy use (C)
/// and number of neighbours (V); every criterion minimized.
pub const LOGEMENTS_CSV: &str = "\
RowId,Proprietaire,Ville,P,E,C,V
1,Dupont,Marseille,220,15,275,5
2,Dupond,Paris,100,15,85,1
3,Martin,Marseille,220,7,180,1
4,Sanchez,Aubagne,340,7,85,3
5,Durand,Paris,100,7,180,1
";

pub const LOGEMENTS_CRITERIA: [&str; 4] = ["P", "E", "C", "V"];

pub fn logements() -> Relation {
    Relation::read_csv("logements", LOGEMENTS_CSV.as_bytes(), &LOGEMENTS_CRITERIA, &[])
        .expect("fixture parses")
}

/// Two tuples (0, 1) and (1, 0) over criteria A and B: non-agreement holds
/// on A, yet t2 leaves the skyline on A while belonging to the one on AB.
pub fn two_tuple_counterexample() -> Relation {
    Relation::from_rows("counterexample", &["A", "B"], vec![vec![0.0, 1.0], vec![1.0, 0.0]])
        .expect("fixture is valid")
}
