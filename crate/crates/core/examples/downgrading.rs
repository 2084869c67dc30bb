//! Turning d-ary outcomes into bits by elimination or class identification.

use beamsplit::extract::{eliminate, identify, Equipartition, SymbolStream};
use beamsplit::protocols::{BasisId, DetectorModel, ProtocolConfig, ProtocolOutput, Setup};
use beamsplit::statkit::{run_suite, Stream, SuiteConfig};

fn symbols(dim: usize, seed: u64) -> beamsplit::Result<SymbolStream> {
    let cfg = ProtocolConfig {
        setup: Setup::SingleConjugate {
            dim,
            prep_basis: BasisId::Computational,
            prep_index: 0,
            meas_basis: BasisId::Fourier,
            detector: DetectorModel::IDEAL,
        },
        events: 300_000,
        seed,
        block_size: 65_536,
    };
    match cfg.run(4)? {
        ProtocolOutput::Symbols { stream, .. } => Ok(stream),
        ProtocolOutput::Pairs { .. } => unreachable!(),
    }
}

fn main() -> beamsplit::Result<()> {
    let ternary = symbols(3, 29)?;
    let kept = eliminate(&ternary, (0, 1))?;
    let quaternary = symbols(4, 31)?;
    let classes = identify(&quaternary, &Equipartition::parse(4, "0,3|1,2")?)?;
    for (name, input, bits) in [
        ("eliminate 0,1 of 3", ternary.len(), kept),
        ("identify 0,3|1,2 of 4", quaternary.len(), classes),
    ] {
        let suite = run_suite(Stream::Bits(&bits), &SuiteConfig::default())?;
        println!(
            "{name}: {input} symbols -> {} bits, battery pass {}",
            bits.len(),
            suite.overall
        );
    }
    Ok(())
}
