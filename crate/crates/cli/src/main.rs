//! `platypus` — check entailments, search for derivations, axiomatize
//! two-valued matrices, build strict products, and run the 3-SAT reduction,
//! all from the command line.
//!
//! Matrix and rule-set arguments accept a builtin name first, then a file
//! path.  Exit codes: 0 affirmative verdict, 1 negative verdict, 2 usage or
//! input error.

use std::collections::BTreeMap;
use std::fs;

use platypus_core::axiomatizer::axiomatize_boolean;
use platypus_core::calculus::{check_soundness, prove_with_depth, RuleSet};
use platypus_core::formula::{
    infer_signature, parse_formula_list, parse_formula_list_loose, parse_formula_loose, Formula,
};
use platypus_core::nmatrix::{Entailment, Nmatrix, SeparationVerdict, Sequent};
use platypus_core::platypus::{decide_sc, parse_dimacs, sat_oracle, sat_to_sequent};

fn usage() -> String {
    format!(
        "platypus — finite nondeterministic matrices and multiple-conclusion calculi

Usage:
  platypus decide --matrix M --sequent \"f1, f2 |- g1, g2\"
  platypus decide-sc --gamma \"f1, f2\" --phi \"g\"
  platypus prove --rules R --sequent \"f1 |- g1\" [--depth N] [--generators \"h1, h2\"]
  platypus axiomatize --matrix M
  platypus product M1 M2 [--rename \"old=new;old=new\"] [--check-iso M3]
  platypus sat --mode reduce|check --dimacs FILE
  platypus check-soundness --matrix M --rules R
  platypus separate --matrix M --formulas \"p, dot(p,p)\"

M and R name a builtin or a file path.
Exit codes: 0 affirmative verdict, 1 negative verdict, 2 usage or input error.

Builtin matrices: {}
Builtin calculi:  {}
",
        Nmatrix::builtin_names().join(" "),
        RuleSet::builtin_names().join(" ")
    )
}

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    std::process::exit(run(&args));
}

fn run(args: &[String]) -> i32 {
    let Some(command) = args.first() else {
        eprint!("{}", usage());
        return 2;
    };
    if matches!(command.as_str(), "help" | "--help" | "-h") {
        print!("{}", usage());
        return 0;
    }
    let rest = &args[1..];
    let outcome = match command.as_str() {
        "decide" => cmd_decide(rest),
        "decide-sc" => cmd_decide_sc(rest),
        "prove" => cmd_prove(rest),
        "axiomatize" => cmd_axiomatize(rest),
        "product" => cmd_product(rest),
        "sat" => cmd_sat(rest),
        "check-soundness" => cmd_check_soundness(rest),
        "separate" => cmd_separate(rest),
        other => Err(format!("unknown command `{other}` (try `platypus help`)")),
    };
    match outcome {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            2
        }
    }
}

fn parse_flags(
    args: &[String],
    spec: &[&str],
) -> Result<(BTreeMap<String, String>, Vec<String>), String> {
    let mut flags = BTreeMap::new();
    let mut positionals = Vec::new();
    let mut i = 0;
    while i < args.len() {
        if let Some(name) = args[i].strip_prefix("--") {
            if !spec.contains(&name) {
                return Err(format!("unknown flag `--{name}`"));
            }
            let value = args
                .get(i + 1)
                .ok_or_else(|| format!("`--{name}` needs a value"))?;
            if flags.insert(name.to_string(), value.clone()).is_some() {
                return Err(format!("`--{name}` given twice"));
            }
            i += 2;
        } else {
            positionals.push(args[i].clone());
            i += 1;
        }
    }
    Ok((flags, positionals))
}

fn require<'m>(flags: &'m BTreeMap<String, String>, name: &str) -> Result<&'m str, String> {
    flags
        .get(name)
        .map(|s| s.as_str())
        .ok_or_else(|| format!("`--{name}` is required"))
}

fn no_positionals(positionals: &[String]) -> Result<(), String> {
    match positionals.first() {
        None => Ok(()),
        Some(arg) => Err(format!("unexpected argument `{arg}`")),
    }
}

fn load_matrix(spec: &str) -> Result<Nmatrix, String> {
    if Nmatrix::builtin_names().contains(&spec) {
        return Ok(Nmatrix::builtin(spec).expect("listed builtin"));
    }
    let text = fs::read_to_string(spec)
        .map_err(|e| format!("`{spec}` is not a builtin matrix and not a readable file: {e}"))?;
    Nmatrix::parse(&text).map_err(|e| format!("{spec}: {e}"))
}

fn load_rules(spec: &str) -> Result<RuleSet, String> {
    if RuleSet::builtin_names().contains(&spec) {
        return Ok(RuleSet::builtin(spec).expect("listed builtin"));
    }
    let text = fs::read_to_string(spec)
        .map_err(|e| format!("`{spec}` is not a builtin calculus and not a readable file: {e}"))?;
    RuleSet::parse(&text).map_err(|e| format!("{spec}: {e}"))
}

fn cmd_decide(args: &[String]) -> Result<i32, String> {
    let (flags, positionals) = parse_flags(args, &["matrix", "sequent"])?;
    no_positionals(&positionals)?;
    let matrix = load_matrix(require(&flags, "matrix")?)?;
    let sequent = Sequent::parse(require(&flags, "sequent")?, matrix.signature())
        .map_err(|e| format!("sequent: {e}"))?;
    match matrix.entails(&sequent) {
        Entailment::Valid => {
            println!("VALID");
            Ok(0)
        }
        Entailment::Invalid(valuation) => {
            println!("INVALID");
            println!("countervaluation:");
            print!("{}", valuation.render("  "));
            Ok(1)
        }
    }
}

fn cmd_decide_sc(args: &[String]) -> Result<i32, String> {
    let (flags, positionals) = parse_flags(args, &["gamma", "phi"])?;
    no_positionals(&positionals)?;
    let gamma = parse_formula_list_loose(require(&flags, "gamma")?)
        .map_err(|e| format!("gamma: {e}"))?;
    let phi = parse_formula_loose(require(&flags, "phi")?).map_err(|e| format!("phi: {e}"))?;
    match decide_sc(&gamma.into_iter().collect(), &phi).map_err(|e| e.to_string())? {
        true => {
            println!("DERIVABLE");
            Ok(0)
        }
        false => {
            println!("NOT-DERIVABLE");
            Ok(1)
        }
    }
}

fn cmd_prove(args: &[String]) -> Result<i32, String> {
    let (flags, positionals) =
        parse_flags(args, &["rules", "sequent", "depth", "generators"])?;
    no_positionals(&positionals)?;
    let rules = load_rules(require(&flags, "rules")?)?;
    let sequent =
        Sequent::parse_loose(require(&flags, "sequent")?).map_err(|e| format!("sequent: {e}"))?;
    let generators: Vec<Formula> = match flags.get("generators") {
        Some(text) => parse_formula_list_loose(text).map_err(|e| format!("generators: {e}"))?,
        None => Vec::new(),
    };
    // catch arity typos against the calculus
    let used = infer_signature(
        sequent
            .premises()
            .iter()
            .chain(sequent.conclusions().iter())
            .chain(generators.iter()),
    )
    .map_err(|e| e.to_string())?;
    used.merged(rules.signature()).map_err(|e| e.to_string())?;
    let depth = match flags.get("depth") {
        Some(text) => text
            .parse::<usize>()
            .map_err(|_| format!("`--depth` must be a number, got `{text}`"))?,
        None => usize::MAX,
    };
    match prove_with_depth(&rules, &sequent, &generators, depth) {
        Some(derivation) => {
            print!("{}", derivation.render());
            Ok(0)
        }
        None => {
            println!("EXHAUSTED");
            Ok(1)
        }
    }
}

fn cmd_axiomatize(args: &[String]) -> Result<i32, String> {
    let (flags, positionals) = parse_flags(args, &["matrix"])?;
    no_positionals(&positionals)?;
    let matrix = load_matrix(require(&flags, "matrix")?)?;
    let rules = axiomatize_boolean(&matrix).map_err(|e| e.to_string())?;
    print!("{}", rules.format());
    Ok(0)
}

fn cmd_product(args: &[String]) -> Result<i32, String> {
    let (flags, positionals) = parse_flags(args, &["rename", "check-iso"])?;
    let [left_spec, right_spec] = positionals.as_slice() else {
        return Err("product needs exactly two matrices".to_string());
    };
    let left = load_matrix(left_spec)?;
    let right = load_matrix(right_spec)?;
    let mut product = left.strict_product(&right).map_err(|e| e.to_string())?;
    if let Some(map_text) = flags.get("rename") {
        let mut map = BTreeMap::new();
        for entry in map_text.split(';') {
            let entry = entry.trim();
            if entry.is_empty() {
                continue;
            }
            let (old, new) = entry
                .split_once('=')
                .ok_or_else(|| format!("bad rename entry `{entry}` (use `old=new;old=new`)"))?;
            map.insert(old.trim().to_string(), new.trim().to_string());
        }
        product = product.rename_values(&map).map_err(|e| e.to_string())?;
    }
    print!("{}", product.format());
    if let Some(other_spec) = flags.get("check-iso") {
        let other = load_matrix(other_spec)?;
        return Ok(match product.is_isomorphic_to(&other) {
            Some(_) => {
                println!("ISOMORPHIC");
                0
            }
            None => {
                println!("NOT-ISOMORPHIC");
                1
            }
        });
    }
    Ok(0)
}

fn cmd_sat(args: &[String]) -> Result<i32, String> {
    let (flags, positionals) = parse_flags(args, &["mode", "dimacs"])?;
    no_positionals(&positionals)?;
    let path = require(&flags, "dimacs")?;
    let text = fs::read_to_string(path).map_err(|e| format!("cannot read `{path}`: {e}"))?;
    let cnf = parse_dimacs(&text).map_err(|e| format!("{path}: {e}"))?;
    match require(&flags, "mode")? {
        "reduce" => {
            println!("{}", sat_to_sequent(&cnf));
            Ok(0)
        }
        "check" => {
            if cnf.num_vars > 24 {
                return Err("the brute-force check supports at most 24 variables".to_string());
            }
            let matrix = Nmatrix::builtin("BM_pl").expect("builtin");
            let oracle_sat = sat_oracle(&cnf);
            let reduction_sat = !matrix.entails(&sat_to_sequent(&cnf)).is_valid();
            let word = |sat: bool| if sat { "SATISFIABLE" } else { "UNSATISFIABLE" };
            println!("oracle: {}", word(oracle_sat));
            println!("reduction: {}", word(reduction_sat));
            if oracle_sat == reduction_sat {
                println!("AGREE");
                Ok(0)
            } else {
                println!("DISAGREE");
                Ok(1)
            }
        }
        other => Err(format!("unknown mode `{other}` (use `reduce` or `check`)")),
    }
}

fn cmd_check_soundness(args: &[String]) -> Result<i32, String> {
    let (flags, positionals) = parse_flags(args, &["matrix", "rules"])?;
    no_positionals(&positionals)?;
    let matrix = load_matrix(require(&flags, "matrix")?)?;
    let rules = load_rules(require(&flags, "rules")?)?;
    for (name, arity) in rules.signature().iter() {
        if matrix.signature().arity(name) != Some(arity) {
            return Err(format!(
                "rule connective `{name}` (arity {arity}) is not interpreted by the matrix"
            ));
        }
    }
    let mut any_unsound = false;
    for rule in rules.rules() {
        match check_soundness(&matrix, rule) {
            Entailment::Valid => println!("{}: SOUND", rule.name),
            Entailment::Invalid(valuation) => {
                any_unsound = true;
                println!("{}: UNSOUND", rule.name);
                print!("{}", valuation.render("  "));
            }
        }
    }
    Ok(if any_unsound { 1 } else { 0 })
}

fn cmd_separate(args: &[String]) -> Result<i32, String> {
    let (flags, positionals) = parse_flags(args, &["matrix", "formulas"])?;
    no_positionals(&positionals)?;
    let matrix = load_matrix(require(&flags, "matrix")?)?;
    let formulas = parse_formula_list(require(&flags, "formulas")?, matrix.signature())
        .map_err(|e| format!("formulas: {e}"))?;
    match matrix.separates(&formulas).map_err(|e| e.to_string())? {
        SeparationVerdict::Separating => {
            println!("SEPARATES");
            Ok(0)
        }
        SeparationVerdict::Unseparated { left, right } => {
            println!("NOT-SEPARATING: {left} {right}");
            Ok(1)
        }
    }
}
