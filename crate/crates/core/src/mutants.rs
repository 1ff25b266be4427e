//! Deliberate interpreter faults, used to check that the soundness tests
//! notice them. They can only be switched on with the `mutants` feature.

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mutant {
    /// `if` never explores its else arm.
    DropElse,
    /// Division skips the zero test on the divisor.
    SkipDivGuard,
    /// `assert` fails when its argument holds and succeeds otherwise.
    SwapAssert,
    /// Map lookup only matches syntactically identical keys.
    StaleMapFind,
    /// `run` yields leaves without the final feasibility check.
    SkipLeafCheck,
}

impl Mutant {
    pub const ALL: [Mutant; 5] = [
        Mutant::DropElse,
        Mutant::SkipDivGuard,
        Mutant::SwapAssert,
        Mutant::StaleMapFind,
        Mutant::SkipLeafCheck,
    ];
}
