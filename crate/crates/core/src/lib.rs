//! Prime filtrations of powers of monomial ideals.
//!
//! Everything is exact and lives in the monomial world: ideals are stored by
//! minimal generators, primes by their variable support, and every emitted
//! filtration can be re-checked step by step with
//! [`PrimeFiltration::validate`].

pub mod closure;
pub mod decomposition;
pub mod epsilon;
pub mod error;
pub mod filtration;
pub mod parse;
pub mod powers;
pub mod report;
pub mod ring;
pub mod superficial;

pub use decomposition::{associated_primes, irreducible_decomposition, minh, MonomialPrime};
pub use error::{Error, Result};
pub use filtration::{naive_prime_filtration, MultiplicityLedger, PrimeFiltration};
pub use parse::{parse_document, parse_ideal};
pub use powers::{powers_report, Mode, PowersOptions, PowersReport};
pub use ring::{Monomial, MonomialIdeal, RingContext};
pub use superficial::{find_superficial, CyclicFilteredModule, SearchBounds, SuperficialCertificate};
