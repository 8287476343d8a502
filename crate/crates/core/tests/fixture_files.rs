//! The shipped fixture files agree with the builders. Set `AINFTY_BLESS=1`
//! to rewrite them.

use std::path::PathBuf;

use ainfty_core::doc::{emit, load, parse_str, to_string, AlgebraDocument};
use ainfty_core::fixtures;
use ainfty_core::Field;

fn shipped() -> Vec<(&'static str, AlgebraDocument)> {
    let f7 = Field::Fp(7);
    vec![
        ("heis_f7", fixtures::heis(f7)),
        ("heis_q", fixtures::heis(Field::Q)),
        ("heis_unital_f7", fixtures::heis_unital(f7)),
        ("s3u_q", fixtures::s3u(Field::Q)),
        ("s3u_f7", fixtures::s3u(f7)),
        ("zero_q", fixtures::zero(Field::Q)),
        ("heis_z_q", fixtures::heis_z(Field::Q)),
        ("heis_z_f7", fixtures::heis_z(f7)),
        ("heis_tr_f7", fixtures::heis_tr(f7)),
        ("heis_tr_q", fixtures::heis_tr(Field::Q)),
    ]
}

fn path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(format!("{name}.json"))
}

#[test]
fn fixture_files_match_builders() {
    let bless = std::env::var_os("AINFTY_BLESS").is_some();
    for (name, doc) in shipped() {
        let p = path(name);
        if bless {
            std::fs::write(&p, to_string(&doc) + "\n").unwrap();
        }
        let text = std::fs::read_to_string(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
        assert_eq!(parse_str(&text).unwrap(), doc, "{name}");
    }
}

#[test]
fn fixture_files_round_trip() {
    for (name, doc) in shipped() {
        let l = load(&doc).unwrap();
        assert_eq!(emit(&l), doc, "{name}");
    }
}
