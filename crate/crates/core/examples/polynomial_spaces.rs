//! Dimensions of the polynomial spaces behind the element, checked against
//! their closed forms, plus a look at S_2 on the triangle.

use bdm_aniso::polyspace::{basis, SpaceSpec};

fn main() -> bdm_aniso::Result<()> {
    let specs = [
        SpaceSpec::TotalDegree { k: 2, d: 3 },
        SpaceSpec::TensorDegree { k: 2, dim: 2 },
        SpaceSpec::PrismGraded { m: 2, n: 1 },
        SpaceSpec::NedelecTriangle { m: 2 },
        SpaceSpec::NedelecTet { m: 2 },
        SpaceSpec::HomogeneousTangential { m: 2, d: 2 },
        SpaceSpec::PrismPairs { m: 1, n: 2 },
        SpaceSpec::BdmSimplex { k: 2, d: 3 },
        SpaceSpec::BdmPrism { k: 2 },
    ];
    println!("{:<48} {:>6} {:>6}", "space", "basis", "closed");
    for spec in specs {
        let b = basis(spec)?;
        println!("{:<48} {:>6} {:>6}", format!("{spec:?}"), b.dimension(), spec.dimension());
    }

    // members of S_2 are tangential: p(x)·x vanishes identically
    let s2 = basis(SpaceSpec::HomogeneousTangential { m: 2, d: 2 })?;
    for p in s2.vectors().expect("vector space") {
        println!("S_2 member {:?}  p·x = 0: {}", p.eval(&[0.3, 0.7])?, p.dot_position().is_zero());
    }
    Ok(())
}
