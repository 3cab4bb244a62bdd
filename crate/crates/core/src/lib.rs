pub mod axioms;
pub mod cochain;
pub mod deligne;
pub mod demos;
pub mod error;
pub mod field;
mod injective;
pub mod linalg;
pub mod report;
pub mod sheaf;
pub mod sheafcx;
pub mod simplicial;
pub mod stratify;

pub use deligne::{build_ic, build_ic_pure, local_system_of, BuildOptions, ICBundle};
pub use cochain::{ChainMap, Cochain, DimTable};
pub use error::{Error, Result};
pub use field::{Field, FieldChoice, Fp, Rational};
pub use sheaf::{CellularSheaf, LocalSystem};
pub use sheafcx::{SheafComplex, StalkTable};
pub use simplicial::{SimplexSet, SimplicialComplex, Vertex};
pub use stratify::{OpenFiltration, Stratification};

pub type QSheafComplex = SheafComplex<Rational>;
pub type QCellularSheaf = CellularSheaf<Rational>;
pub type QLocalSystem = LocalSystem<Rational>;
