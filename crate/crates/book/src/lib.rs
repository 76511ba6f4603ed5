//! Guide chapters compiled as doc-tests.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/quadrature.md")]
pub mod quadrature {}

#[doc = include_str!("../../../book/src/profiles.md")]
pub mod profiles {}

#[doc = include_str!("../../../book/src/formal_powers.md")]
pub mod formal_powers {}

#[doc = include_str!("../../../book/src/vekua.md")]
pub mod vekua {}

#[doc = include_str!("../../../book/src/fields.md")]
pub mod fields {}

#[doc = include_str!("../../../book/src/collocation.md")]
pub mod collocation {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
