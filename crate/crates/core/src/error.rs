use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Everything that can go wrong in the library. Each hypothesis violation has
/// its own variant so front ends can name it.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("zero is not a valid input here")]
    Zero,
    #[error("negative input {0} where a nonnegative integer is required")]
    Negative(i64),
    #[error("{0} is not a prime")]
    NotPrime(i64),
    #[error("modulus {0} must be odd and positive")]
    BadModulus(i64),
    #[error("{value} is divisible by the prime {prime}")]
    NotUnit { value: i64, prime: i64 },
    #[error("{0} is not squarefree or equals 1")]
    BadSquareClass(i64),
    #[error("prime {q} ramifies in Q(sqrt({d}))")]
    Ramified { q: i64, d: i64 },
    #[error("arithmetic overflow while computing {0}")]
    Overflow(&'static str),
    #[error("factorization of {0} did not converge")]
    FactorizationFailed(u64),

    #[error("coefficients a, b, c must be positive")]
    NonPositiveCoefficient,
    #[error("gcd(a, b, c) = {0}, must be 1")]
    GcdNotOne(i64),
    #[error("p = {0} must be an odd prime")]
    BadPrime(i64),
    #[error("p divides c")]
    PDividesC,
    #[error("k must be positive")]
    BadExponent,
    #[error("polygonal order m = {0} must be at least 3")]
    BadOrder(i64),
    #[error("bound {requested} exceeds the sieve budget of {cap}")]
    BudgetExceeded { requested: u64, cap: u64 },
}
