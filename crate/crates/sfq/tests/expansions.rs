//! The hand expansions of the equation on low corollas; see `oracles`.

mod oracles;

#[test]
fn level_two_expansion() {
    assert_eq!(oracles::level_two(), Ok(4));
}

#[test]
fn five_block_expansion_at_level_three() {
    assert_eq!(oracles::five_block(), Ok(3));
}

#[test]
fn general_expansion_at_level_three() {
    assert_eq!(oracles::general_level_three(), Ok(3));
}

#[test]
fn top_row_expansion_at_level_four() {
    assert_eq!(oracles::top_row(), Ok(1));
}
