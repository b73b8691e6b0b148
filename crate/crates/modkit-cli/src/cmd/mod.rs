pub mod chars;
pub mod eisen;
pub mod field;
pub mod kloosterman;
pub mod shifted;
pub mod spectral;
pub mod whittaker;

use crate::RunConfig;
use modkit::nf::Field;

pub fn field_of(cfg: &RunConfig) -> modkit::Result<Field> {
    Field::new(cfg.field)
}

/// CSV output is reserved for sweep-style commands.
pub fn json_only(cfg: &RunConfig) -> modkit::Result<()> {
    match cfg.format {
        Some(crate::Format::Csv) => Err(modkit::Error::Domain("this command only writes JSON".into())),
        _ => Ok(()),
    }
}
