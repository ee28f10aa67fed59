//! Randomized properties over the stage primitives: invariants that must
//! hold for every input, checked over generated cases with shrinking.

use proptest::prelude::*;

use mebc_core::encoder::{count_frequencies, load_section, save_section, EncoderChoice};
use mebc_core::preprocess::{transpose_forward, transpose_inverse};
use mebc_core::quantizer::{LinearDequantizer, LinearQuantizer};

fn dims_and_perm() -> impl Strategy<Value = (Vec<usize>, Vec<u8>)> {
    (1usize..=4)
        .prop_flat_map(|ndim| {
            (
                proptest::collection::vec(1usize..=7, ndim),
                Just((0..ndim as u8).collect::<Vec<u8>>()).prop_shuffle(),
            )
        })
}

proptest! {
    #[test]
    fn transpose_then_inverse_is_identity((dims, perm) in dims_and_perm()) {
        let n: usize = dims.iter().product();
        let data: Vec<f64> = (0..n).map(|i| i as f64 * 0.5 - 3.0).collect();

        let (t_dims, t_data) = transpose_forward(&dims, &data, &perm).unwrap();
        prop_assert_eq!(t_data.len(), n);
        let (back_dims, back) = transpose_inverse(&t_dims, &t_data, &perm).unwrap();
        prop_assert_eq!(back_dims, dims);
        prop_assert_eq!(back, data);
    }

    #[test]
    fn quantize_recover_stays_within_the_bound(
        values in proptest::collection::vec(-1e6f64..1e6, 1..200),
        preds in proptest::collection::vec(-1e6f64..1e6, 1..200),
        eb_exp in -8f64..2.0,
    ) {
        let eb = 10f64.powf(eb_exp);
        let mut quant = LinearQuantizer::<f64>::new(eb, 512);
        let pairs: Vec<(f64, f64)> = values
            .iter()
            .zip(preds.iter().cycle())
            .map(|(&v, &p)| (v, p))
            .collect();
        let codes: Vec<u32> = pairs.iter().map(|&(v, p)| quant.quantize(v, p).0).collect();

        let mut dequant = LinearDequantizer::<f64>::load(&quant.save()).unwrap();
        for (&(v, p), &code) in pairs.iter().zip(&codes) {
            let decoded = dequant.recover(code, p).unwrap();
            prop_assert!((decoded - v).abs() <= eb, "|{decoded} - {v}| > {eb}");
        }
    }

    #[test]
    fn encoder_sections_round_trip(
        symbols in proptest::collection::vec(0u32..64, 0..400),
        radius in 1u32..=64,
    ) {
        let table_counts = count_frequencies(&symbols);
        prop_assume!(!table_counts.is_empty() || symbols.is_empty());

        let section = save_section(&symbols, EncoderChoice::Dynamic).unwrap();
        let decoded = load_section(&section, symbols.len(), radius).unwrap();
        prop_assert_eq!(&decoded, &symbols);

        let fixed = save_section(&symbols, EncoderChoice::Fixed { radius: 64 }).unwrap();
        let decoded = load_section(&fixed, symbols.len(), 64).unwrap();
        prop_assert_eq!(&decoded, &symbols);
    }
}
