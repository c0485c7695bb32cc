//! Seeded train/validation/test splits, plain and stratified.

use vqc::harness::{split_indices, SplitMix64, SplitSpec};

fn main() -> vqc::Result<()> {
    let mut rng = SplitMix64::new(1234567);
    println!(
        "splitmix64(1234567): {} {} {}",
        rng.next_u64(),
        rng.next_u64(),
        rng.next_u64()
    );

    let labels: Vec<u8> = (0..20).map(|i| u8::from(i % 4 == 0)).collect();
    for stratified in [false, true] {
        let spec = SplitSpec {
            stratified,
            ..SplitSpec::new(10, 5, 5, 42)
        };
        let s = split_indices(&labels, &spec)?;
        let pos = |ix: &[usize]| ix.iter().filter(|&&i| labels[i] == 1).count();
        println!(
            "stratified = {stratified}: train {:?} ({} positive), val {:?} ({}), test {:?} ({})",
            s.train,
            pos(&s.train),
            s.val,
            pos(&s.val),
            s.test,
            pos(&s.test)
        );
    }
    Ok(())
}
