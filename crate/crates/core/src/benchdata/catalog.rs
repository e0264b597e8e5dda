use super::{BenchmarkSpec, DataError, TargetExpr};

// (name, expression, lo, hi, samples, constants allowed)
const TABLE: &[(&str, &str, f64, f64, usize, bool)] = &[
    ("Nguyen-1", "x^3 + x^2 + x", -1.0, 1.0, 20, false),
    ("Nguyen-2", "x^4 + x^3 + x^2 + x", -1.0, 1.0, 20, false),
    ("Nguyen-3", "x^5 + x^4 + x^3 + x^2 + x", -1.0, 1.0, 20, false),
    ("Nguyen-4", "x^6 + x^5 + x^4 + x^3 + x^2 + x", -1.0, 1.0, 20, false),
    ("Nguyen-5", "sin(x^2)*cos(x) - 1", -1.0, 1.0, 20, false),
    ("Nguyen-6", "sin(x) + sin(x + x^2)", -1.0, 1.0, 20, false),
    ("Nguyen-7", "log(x + 1) + log(x^2 + 1)", 0.0, 2.0, 20, false),
    ("Nguyen-8", "sqrt(x)", 0.0, 4.0, 20, false),
    ("Nguyen-9", "sin(x) + sin(y^2)", 0.0, 1.0, 20, false),
    ("Nguyen-10", "2*sin(x)*cos(y)", 0.0, 1.0, 20, false),
    ("Nguyen-11", "x^y", 0.0, 1.0, 20, false),
    ("Nguyen-12", "x^4 - x^3 + 0.5*y^2 - y", 0.0, 1.0, 20, false),
    ("Nguyen-12*", "x^4 - x^3 + 0.5*y^2 - y", 0.0, 10.0, 20, false),
    ("Livermore-1", "1/3 + x + sin(x^2)", -10.0, 10.0, 1000, false),
    ("Livermore-2", "sin(x^2)*cos(x) - 2", -1.0, 1.0, 20, false),
    ("Livermore-3", "sin(x^3)*cos(x^2) - 1", -1.0, 1.0, 20, false),
    ("Livermore-4", "log(x + 1) + log(x^2 + 1) + log(x)", 0.0, 2.0, 20, false),
    ("Livermore-5", "x^4 - x^3 + x^2 - y", 0.0, 1.0, 20, false),
    ("Livermore-6", "4*x^4 + 3*x^3 + 2*x^2 + x", -1.0, 1.0, 20, false),
    ("Livermore-7", "sinh(x)", -1.0, 1.0, 20, false),
    ("Livermore-8", "cosh(x)", -1.0, 1.0, 20, false),
    ("Livermore-9", "x^9 + x^8 + x^7 + x^6 + x^5 + x^4 + x^3 + x^2 + x", -1.0, 1.0, 20, false),
    ("Livermore-10", "6*sin(x)*cos(y)", 0.0, 1.0, 20, false),
    ("Livermore-11", "x^2*y^2/(x + y)", -1.0, 1.0, 20, false),
    ("Livermore-12", "x^5/y^3", -1.0, 1.0, 20, false),
    ("Livermore-13", "x^(1/3)", 0.0, 4.0, 20, false),
    ("Livermore-14", "x^3 + x^2 + x + sin(x) + sin(x^2)", -1.0, 1.0, 20, false),
    ("Livermore-15", "x^(1/5)", 0.0, 4.0, 20, false),
    ("Livermore-16", "x^(2/5)", 0.0, 4.0, 20, false),
    ("Livermore-17", "4*sin(x)*cos(y)", 0.0, 1.0, 20, false),
    ("Livermore-18", "sin(x^2)*cos(x) - 5", -1.0, 1.0, 20, false),
    ("Livermore-19", "x^5 + x^4 + x^2 + x", -1.0, 1.0, 20, false),
    ("Livermore-20", "exp(-x^2)", -1.0, 1.0, 20, false),
    ("Livermore-21", "x^8 + x^7 + x^6 + x^5 + x^4 + x^3 + x^2 + x", -1.0, 1.0, 20, false),
    ("Livermore-22", "exp(-0.5*x^2)", -1.0, 1.0, 20, false),
    ("Nguyen-1c", "3.39*x^3 + 2.12*x^2 + 1.78*x", -1.0, 1.0, 20, true),
    ("Nguyen-5c", "sin(x^2)*cos(x) - 0.75", -1.0, 1.0, 20, true),
    ("Nguyen-7c", "log(x + 1.4) + log(x^2 + 1.3)", 0.0, 2.0, 20, true),
    ("Nguyen-8c", "sqrt(1.23*x)", 0.0, 4.0, 20, true),
    ("Nguyen-10c", "sin(1.5*x)*cos(0.5*y)", 0.0, 1.0, 20, true),
    ("Jin-1", "2.5*x^4 - 1.3*x^3 + 0.5*y^2 - 1.7*y", -3.0, 3.0, 100, true),
    ("Jin-2", "8.0*x^2 + 8.0*y^3 - 15.0", -3.0, 3.0, 100, true),
    ("Jin-3", "0.2*x^3 + 0.5*y^3 - 1.2*y - 0.5*x", -3.0, 3.0, 100, true),
    ("Jin-4", "1.5*exp(x) + 5.0*cos(y)", -3.0, 3.0, 100, true),
    ("Jin-5", "6.0*sin(x)*cos(y)", -3.0, 3.0, 100, true),
    ("Jin-6", "1.35*x*y + 5.5*sin((x - 1.0)*(y - 1.0))", -3.0, 3.0, 100, true),
];

/// All built-in benchmarks in catalog order.
pub fn builtin_benchmarks() -> Vec<BenchmarkSpec> {
    TABLE
        .iter()
        .map(|&(name, expression, lo, hi, samples, constants_allowed)| {
            let target = TargetExpr::parse(expression).expect("catalog expressions parse");
            BenchmarkSpec {
                name: name.to_string(),
                expression: expression.to_string(),
                n_vars: target.arity(),
                target,
                interval: (lo, hi),
                samples,
                constants_allowed,
            }
        })
        .collect()
}

/// Looks up a benchmark by name, ignoring ASCII case. `Nguyen-1^c` and
/// `Nguyen-1c` are accepted for the constant variants.
pub fn benchmark(name: &str) -> Result<BenchmarkSpec, DataError> {
    let wanted = name.replace("^c", "c");
    builtin_benchmarks()
        .into_iter()
        .find(|s| s.name.eq_ignore_ascii_case(&wanted))
        .ok_or_else(|| DataError::UnknownBenchmark(name.to_string()))
}
