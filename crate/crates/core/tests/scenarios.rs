use std::path::PathBuf;

use gridaudit_core::*;

fn fixture(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn instance(name: &str) -> SpreadsheetInstance {
    instantiate(load_program(&fixture(name)).unwrap(), []).unwrap()
}

fn a(s: &str) -> CellAddress {
    parse_address(s).unwrap()
}

fn findings(inst: &SpreadsheetInstance) -> Vec<(String, String)> {
    let eval = eval_instance_lenient(inst);
    detect_all(inst.program(), Some(&eval))
        .iter()
        .map(|d| (d.code.to_string(), d.location().to_string()))
        .collect()
}

fn pairs(xs: &[(&str, &str)]) -> Vec<(String, String)> {
    xs.iter().map(|(c, l)| (c.to_string(), l.to_string())).collect()
}

#[test]
fn quarters_sum_and_findings() {
    let inst = instance("quarters.sheet");
    let r = eval_instance(&inst).unwrap();
    assert_eq!(r.value(a("B12")), Value::Number(1020.0));
    assert_eq!(
        findings(&inst),
        pairs(&[("D1_BLANK_REF", "B3"), ("D2_WRONG_TYPE_IN_RANGE", "B2"), ("D2_WRONG_TYPE_IN_RANGE", "B7")])
    );
}

#[test]
fn quarters_bands() {
    let inst = instance("quarters_inputs.sheet");
    let spec = parse_interval_spec(&fixture("quarters_bands.intervals")).unwrap();
    spec.validate(inst.program()).unwrap();
    let b = eval_intervals(inst.program(), &spec).unwrap();
    assert_eq!(b[&a("B12")], IntervalValue::Interval(Interval::new(918.0, 1122.0).unwrap()));
    let report = run_interval_test(&inst, &spec).unwrap();
    assert_eq!(report.record(a("B12")).unwrap().verdict, Verdict::NoSymptom);
}

#[test]
fn sales_panels() {
    let left = instance("sales_two_each.sheet");
    assert_eq!(eval_instance(&left).unwrap().value(a("C6")), Value::Number(3000.0));
    assert!(findings(&left).is_empty());

    let middle = instance("sales_inserted.sheet");
    assert_eq!(eval_instance(&middle).unwrap().value(a("C7")), Value::Number(3300.0));
    assert!(findings(&middle).iter().all(|(c, _)| c != "D3_INCORRECT_RANGE"));

    let right = instance("sales_appended.sheet");
    let r = eval_instance(&right).unwrap();
    assert_eq!(r.value(a("C8")), Value::Number(3300.0));
    let full: f64 = (2..=7).map(|row| r.value(CellAddress::new(3, row)).as_number().unwrap()).sum();
    assert_eq!(full, 3900.0);
    assert_eq!(findings(&right), pairs(&[("D3_INCORRECT_RANGE", "C7")]));
}

#[test]
fn sales_interval_test() {
    let inst = instance("sales_appended.sheet");
    let spec = parse_interval_spec(&fixture("sales_appended.intervals")).unwrap();
    let report = run_interval_test(&inst, &spec).unwrap();
    let rec = report.record(a("C8")).unwrap();
    assert_eq!(rec.verdict, Verdict::SymptomValueOutside);
    let suspects: Vec<_> = rec.suspects.iter().map(|s| s.to_string()).collect();
    assert_eq!(suspects, ["C2", "C3", "C4", "C5", "C6"]);

    let left = instance("sales_two_each.sheet");
    let spec = parse_interval_spec(&fixture("sales_two_each.intervals")).unwrap();
    assert!(!run_interval_test(&left, &spec).unwrap().has_symptoms());

    let bad = parse_interval_spec(&fixture("label_expect.intervals")).unwrap();
    assert_eq!(bad.validate(left.program()), Err(SpecError::NotAFormulaCell(a("A6"))));
}

#[test]
fn subtotals_layouts() {
    let cols = instance("subtotals_columns.sheet");
    let r = eval_instance(&cols).unwrap();
    assert_eq!(r.value(a("D6")), Value::Number(2400.0));
    assert_eq!(r.value(a("D10")), Value::Number(2500.0));
    assert_eq!(r.value(a("D11")), Value::Number(4900.0));
    assert!(findings(&cols).is_empty());
    let rects: Vec<_> = infer_physical_areas(cols.program()).iter().map(|p| p.rect.to_string()).collect();
    assert_eq!(rects, ["C3:C5", "C7:C9"]);

    let single = instance("subtotals_single.sheet");
    assert_eq!(eval_instance(&single).unwrap().value(a("H11")), Value::Number(4900.0));
    assert!(findings(&single).is_empty());

    let three = instance("subtotals_single3.sheet");
    assert_eq!(findings(&three), pairs(&[("D4_AREA_MIXUP", "H15")]));
}

#[test]
fn clean_and_cycle_fixtures() {
    let clean = instance("clean.sheet");
    assert!(findings(&clean).is_empty());
    let spec = parse_interval_spec(&fixture("clean.intervals")).unwrap();
    assert!(!run_interval_test(&clean, &spec).unwrap().has_symptoms());

    let cyc = instance("cycle.sheet");
    assert!(eval_instance(&cyc).is_err());
    assert_eq!(
        findings(&cyc),
        pairs(&[("G_CYCLE", "A1"), ("G_DIV_ZERO", "C1")])
    );
    assert!(load_program(&fixture("empty.sheet")).unwrap().is_empty());
}
