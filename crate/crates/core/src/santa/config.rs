/// Per-class job counts placed explicitly in one bag.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Config {
    pub counts: Vec<u16>,
    pub content: u64,
}

/// All count vectors x ≤ `available` with Σ x_i·size_i ≤ `max_content`, in
/// lexicographic order.
pub fn enumerate_configs(sizes: &[u64], available: &[u16], max_content: u64) -> Vec<Config> {
    fn go(
        i: usize,
        sizes: &[u64],
        available: &[u16],
        room: u64,
        current: &mut Vec<u16>,
        content: u64,
        out: &mut Vec<Config>,
    ) {
        if i == sizes.len() {
            out.push(Config {
                counts: current.clone(),
                content,
            });
            return;
        }
        let fit = (room / sizes[i]).min(available[i] as u64) as u16;
        for c in 0..=fit {
            current.push(c);
            let used = c as u64 * sizes[i];
            go(i + 1, sizes, available, room - used, current, content + used, out);
            current.pop();
        }
    }
    let mut out = Vec::new();
    go(0, sizes, available, max_content, &mut Vec::with_capacity(sizes.len()), 0, &mut out);
    out
}

/// Count vectors over `types` kinds with total ≤ `max_total`, lexicographic.
pub fn bounded_multisets(types: usize, max_total: u32) -> Vec<Vec<u32>> {
    fn go(i: usize, types: usize, left: u32, current: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i == types {
            out.push(current.clone());
            return;
        }
        for c in 0..=left {
            current.push(c);
            go(i + 1, types, left - c, current, out);
            current.pop();
        }
    }
    let mut out = Vec::new();
    go(0, types, max_total, &mut Vec::with_capacity(types), &mut out);
    out
}
