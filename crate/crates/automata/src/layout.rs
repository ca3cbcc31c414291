//! Bit-lane layout of word letters.
//!
//! Letter structure: one activity bit per process, one type bit (0 read,
//! 1 write), a value group wide enough for every value plus the two reserved
//! codes, and an object group. Execution mode appends one
//! arbitration-vs-concurrent bit per other process, one concurrent-visibility
//! bit, and `k` visibility bits per process for the operations following the
//! return.

use histcheck_core::MetaParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LayoutMode {
    History,
    Exec { k: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitLayout {
    pub meta: MetaParams,
    pub mode: LayoutMode,
}

fn ceil_log2(n: usize) -> usize {
    if n <= 1 {
        0
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as usize
    }
}

impl BitLayout {
    pub fn history(meta: MetaParams) -> Self {
        BitLayout {
            meta,
            mode: LayoutMode::History,
        }
    }

    pub fn exec(meta: MetaParams, k: usize) -> Self {
        BitLayout {
            meta,
            mode: LayoutMode::Exec { k },
        }
    }

    pub fn num_procs(&self) -> usize {
        self.meta.num_procs()
    }

    pub fn is_exec(&self) -> bool {
        matches!(self.mode, LayoutMode::Exec { .. })
    }

    pub fn k(&self) -> usize {
        match self.mode {
            LayoutMode::History => 0,
            LayoutMode::Exec { k } => k,
        }
    }

    /// Width of the value group: every value index plus the empty and undef
    /// codes must fit.
    pub fn val_bits(&self) -> usize {
        ceil_log2(self.meta.values.len() + 2)
    }

    pub fn obj_bits(&self) -> usize {
        ceil_log2(self.meta.objects.len())
    }

    /// Reserved top codes of the value group.
    pub fn empty_code(&self) -> u64 {
        (1 << self.val_bits()) - 2
    }

    pub fn undef_code(&self) -> u64 {
        (1 << self.val_bits()) - 1
    }

    pub fn active_bit(&self, proc: usize) -> usize {
        debug_assert!(proc < self.num_procs());
        proc
    }

    pub fn type_bit(&self) -> usize {
        self.num_procs()
    }

    pub fn val_bit(&self, j: usize) -> usize {
        debug_assert!(j < self.val_bits());
        self.num_procs() + 1 + j
    }

    pub fn obj_bit(&self, j: usize) -> usize {
        debug_assert!(j < self.obj_bits());
        self.num_procs() + 1 + self.val_bits() + j
    }

    fn exec_base(&self) -> usize {
        self.num_procs() + 1 + self.val_bits() + self.obj_bits()
    }

    /// Arbitration bit for slot `s` (one slot per other process).
    pub fn arc_bit(&self, s: usize) -> usize {
        debug_assert!(self.is_exec() && s + 1 < self.num_procs().max(1));
        self.exec_base() + s
    }

    pub fn visc_bit(&self) -> usize {
        debug_assert!(self.is_exec());
        self.exec_base() + self.num_procs().saturating_sub(1)
    }

    pub fn visrb_bit(&self, proc: usize, i: usize) -> usize {
        debug_assert!(self.is_exec() && i < self.k() && proc < self.num_procs());
        self.visc_bit() + 1 + proc * self.k() + i
    }

    pub fn width(&self) -> usize {
        let base = self.exec_base();
        match self.mode {
            LayoutMode::History => base,
            LayoutMode::Exec { k } => {
                base + (self.num_procs() - 1) + 1 + k * self.num_procs()
            }
        }
    }

    /// Slot index of process `q` among the processes other than `i`,
    /// ascending and skipping `i`.
    pub fn arc_slot_of(&self, i: usize, q: usize) -> usize {
        debug_assert_ne!(i, q);
        if q < i {
            q
        } else {
            q - 1
        }
    }

    /// Inverse of [`arc_slot_of`](Self::arc_slot_of).
    pub fn arc_proc_of(&self, i: usize, s: usize) -> usize {
        if s < i {
            s
        } else {
            s + 1
        }
    }

    /// Lane groups as `(name, width)` pairs in layout order.
    pub fn groups(&self) -> Vec<(&'static str, usize)> {
        let mut g = vec![
            ("active", self.num_procs()),
            ("type", 1),
            ("val", self.val_bits()),
            ("obj", self.obj_bits()),
        ];
        if let LayoutMode::Exec { k } = self.mode {
            g.push(("arc", self.num_procs() - 1));
            g.push(("visc", 1));
            g.push(("visrb", k * self.num_procs()));
        }
        g
    }

    /// Human-readable name of a bit index, used by automaton dumps and the
    /// solver-file emitter.
    pub fn bit_name(&self, bit: usize) -> String {
        let m = self.num_procs();
        if bit < m {
            return format!("ACT_{}", self.meta.processes[bit]);
        }
        if bit == self.type_bit() {
            return "TYPE".to_string();
        }
        if bit < self.num_procs() + 1 + self.val_bits() {
            return format!("VAL{}", bit - self.num_procs() - 1);
        }
        if bit < self.exec_base() {
            return format!("OBJ{}", bit - self.num_procs() - 1 - self.val_bits());
        }
        if self.is_exec() {
            let s = bit - self.exec_base();
            if s < m - 1 {
                return format!("ARC{s}");
            }
            if bit == self.visc_bit() {
                return "VISC".to_string();
            }
            let rel = bit - self.visc_bit() - 1;
            return format!("VRB_{}_{}", rel / self.k(), rel % self.k());
        }
        format!("BIT{bit}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn widths_add_up() {
        let meta = MetaParams::canonical(3, 2, 2);
        let h = BitLayout::history(meta.clone());
        // 3 active + 1 type + 2 val (2 values + 2 reserved codes) + 1 obj.
        assert_eq!(h.width(), 7);
        let x = BitLayout::exec(meta, 2);
        // + 2 arc + 1 visc + 6 visrb.
        assert_eq!(x.width(), 16);
        assert_eq!(x.visrb_bit(2, 1), x.width() - 1);
    }

    #[test]
    fn single_object_needs_no_bits() {
        let meta = MetaParams::canonical(1, 1, 1);
        let l = BitLayout::history(meta);
        assert_eq!(l.obj_bits(), 0);
        assert_eq!(l.val_bits(), 2); // one value + two reserved codes
        assert_eq!(l.empty_code(), 2);
        assert_eq!(l.undef_code(), 3);
    }

    #[test]
    fn arc_slots_skip_own_process() {
        let meta = MetaParams::canonical(3, 1, 1);
        let l = BitLayout::exec(meta, 0);
        assert_eq!(l.arc_slot_of(1, 0), 0);
        assert_eq!(l.arc_slot_of(1, 2), 1);
        assert_eq!(l.arc_proc_of(1, 0), 0);
        assert_eq!(l.arc_proc_of(1, 1), 2);
        for i in 0..3 {
            for q in 0..3 {
                if i != q {
                    assert_eq!(l.arc_proc_of(i, l.arc_slot_of(i, q)), q);
                }
            }
        }
    }
}
