//! Signal transforms shared by the feature extractors.

mod dct;
mod dft;
mod dwt;

pub use dct::{
    block_dct_quant, decode, fdct8, idct8, Block, DctCoeffs, QTable, ANNEX_K_LUMINANCE,
};
pub use dft::{dft2, dft2_plane, idft2_real, Spectrum};
pub use dwt::{
    dwt1, dwt1_plane, idwt1_plane, pyramid, pyramid_plane, Pyramid, Subbands, DB4_HIGH, DB4_LOW,
};
