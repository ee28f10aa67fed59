//! Multilevel interpolation driver. The anchor element is stored raw; every
//! other element is visited exactly once by the level plan, predicted from
//! already-decoded donors along the pass axis, and quantized in place. One
//! buffer serves both sides: at visit time an element still holds its
//! original value (donors were settled by earlier passes), and it is
//! overwritten with its decoded value as soon as its code is emitted.

use crate::encoder::{self, EncoderChoice};
use crate::error::{Error, Result};
use crate::grid::Layout;
use crate::predictor::interp::{self, pass_points};
use crate::quantizer::{LinearDequantizer, LinearQuantizer};
use crate::scalar::Scalar;
use crate::stream::StageParams;

use super::lr::EngineSections;

pub fn compress<S: Scalar>(
    dims: &[usize],
    data: &[S],
    eb: f64,
    params: &StageParams,
) -> Result<EngineSections> {
    let layout = Layout::new(dims);
    let mut work = data.to_vec();
    let mut quant = LinearQuantizer::<S>::new(eb, params.quant_radius);
    let mut codes = Vec::with_capacity(data.len().saturating_sub(1));

    let mut anchor = Vec::with_capacity(S::BYTES);
    work[0].write_le(&mut anchor);

    for pass in interp::plan(dims) {
        for idx in pass_points(&layout, pass) {
            let flat = layout.flat(&idx);
            let pred = interp::predict(&work, &layout, &idx, pass);
            let (code, dec) = quant.quantize(work[flat], pred);
            codes.push(code);
            work[flat] = dec;
        }
    }
    debug_assert_eq!(codes.len(), data.len() - 1);

    Ok(EngineSections {
        predictor: anchor,
        quantizer: quant.save(),
        encoder: encoder::save_section(&codes, EncoderChoice::Dynamic)?,
    })
}

pub fn decompress<S: Scalar>(
    dims: &[usize],
    predictor_sec: &[u8],
    quantizer_sec: &[u8],
    encoder_sec: &[u8],
    params: &StageParams,
) -> Result<Vec<S>> {
    let layout = Layout::new(dims);
    let n = layout.len();
    if predictor_sec.len() != S::BYTES {
        return Err(Error::corrupt(
            "predictor",
            format!("anchor holds {} bytes, element needs {}", predictor_sec.len(), S::BYTES),
        ));
    }
    let mut dequant = LinearDequantizer::<S>::load(quantizer_sec)?;
    let codes = encoder::load_section(encoder_sec, n - 1, params.quant_radius)?;

    let mut work = vec![S::from_f64(0.0); n];
    work[0] = S::read_le(predictor_sec);
    let mut cursor = 0usize;
    for pass in interp::plan(dims) {
        for idx in pass_points(&layout, pass) {
            let flat = layout.flat(&idx);
            let pred = interp::predict(&work, &layout, &idx, pass);
            work[flat] = dequant.recover(codes[cursor], pred)?;
            cursor += 1;
        }
    }
    if cursor != codes.len() {
        return Err(Error::corrupt(
            "encoder",
            format!("{} codes in stream, plan consumed {cursor}", codes.len()),
        ));
    }
    Ok(work)
}
