pub mod cli;
pub mod diagnostics;
pub mod fields;
pub mod linprop;
pub mod nlsolve;
pub mod parallel;
pub mod quadrature;
pub mod scenario;
pub mod specfun;
