pub mod hensel;
pub mod padic;
pub mod poly;
pub mod primes;
pub mod rational;

pub use hensel::hensel_roots;
pub use padic::PadicApprox;
pub use poly::{FpPoly, IntPolynomial, QPolynomial};
pub use primes::{factor, is_prime_u64, is_squarefree, jacobi_symbol, Factorization, Primality};
pub use rational::{format_rational, parse_rational, Rational};
