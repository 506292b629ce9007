mod common;

use fptower::parse::{parse_presentation, parse_word};
use fptower::words::Word;
use proptest::prelude::*;

#[test]
fn smith_normal_form_on_1000_random_matrices() {
    let failures = common::snf_suite(1000, 7);
    assert!(failures.is_empty(), "{failures:#?}");
}

#[test]
fn coset_tables_agree_with_the_cayley_oracle() {
    assert_eq!(common::oracle_cases().len(), 20);
    let failures = common::coset_suite();
    assert!(failures.is_empty(), "{failures:#?}");
}

#[test]
fn word_identities_on_10000_random_cases() {
    let failures = common::word_suite(10_000, 11);
    assert!(failures.is_empty(), "{failures:#?}");
}

fn names() -> Vec<String> {
    ["a", "b", "c"].iter().map(|s| s.to_string()).collect()
}

proptest! {
    #[test]
    fn formatted_words_parse_back(letters in proptest::collection::vec(prop_oneof![-3i32..=-1, 1i32..=3], 0..40)) {
        let pres = parse_presentation("<a,b,c | >").unwrap();
        let w = Word::reduce(letters);
        let text = pres.format_word(&w);
        prop_assert_eq!(parse_word(&text, &names()).unwrap(), w);
    }

    #[test]
    fn presentations_round_trip(rels in proptest::collection::vec(proptest::collection::vec(prop_oneof![-2i32..=-1, 1i32..=2], 1..12), 0..6)) {
        let words: Vec<Word> = rels.into_iter().map(Word::reduce).filter(|w| !w.is_empty()).collect();
        let pres = fptower::Presentation::with_rank("g", 2, words);
        let back = fptower::parse::parse_pres_file(&pres.to_pres_string()).unwrap();
        prop_assert_eq!(back.relators(), pres.relators());
        prop_assert_eq!(back.content_hash(), pres.content_hash());
    }
}
