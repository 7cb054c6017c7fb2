//! The twelve default style templates.
//!
//! Every template is a union of five fixed cell blocks: corner pillars, a
//! centre cross, a top/bottom border, and two 12-cell enemy/treasure
//! groups. The frequent path styles span those blocks, so the directions a
//! corpus PCA keeps are exactly the ones the rarer styles differ along;
//! templates built from cells no frequent style touches would collapse
//! onto each other in two dimensions. Doors sit at the four edge midpoints.

pub(super) const TEMPLATES: [(&str, &str); 12] = [
    (
        "Empty-initial",
        "
        FFFFFFDFFFFFF
        FFFFFFFFFFFFF
        FFFFFFFFFFFFF
        DFFFFFFFFFFFD
        FFFFFFFFFFFFF
        FFFFFFFFFFFFF
        FFFFFFDFFFFFF
        ",
    ),
    (
        "Complex wall maze",
        "
        WWWWWFDFWWWWW
        FFWWFFFFFWWFF
        FFWFFFFFFFWFF
        DFFFFFFFFFFFD
        FFWFFFFFFFWFF
        FFWWFFFFFWWFF
        WWWWWFDFWWWWW
        ",
    ),
    (
        "Dense, less organized",
        "
        FFFFFFDFFFFFF
        FEFFWTWEWFFTF
        FTFEFTEFFTFTF
        DTFTWWBWWTFTD
        FTFTFFFTFEFTF
        FTFFWEWTWFFEF
        FFFFFFDFFFFFF
        ",
    ),
    (
        "Structural complexification",
        "
        FFFFFFDFFFFFF
        FFWWWFWFWWWFF
        FFWFFFFFFFWFF
        DFFFWWFWWFFFD
        FFWFFFFFFFWFF
        FFWWWFWFWWWFF
        FFFFFFDFFFFFF
        ",
    ),
    (
        "Dense, full leniency range",
        "
        FFFFFFDFFFFFF
        FEFFFFFFFFFTF
        FFFFFTEFFFFFF
        DTFTFFBFFTFTD
        FFFFFFFTFFFFF
        FTFFFFFFFFFEF
        FFFFFFDFFFFFF
        ",
    ),
    (
        "Separating and populating chambers",
        "
        FFFFFFDFFFFFF
        FEWWFFFFFWWTF
        FFWFFTEFFFWFF
        DTFTFFBFFTFTD
        FFWFFFFTFFWFF
        FTWWFFFFFWWEF
        FFFFFFDFFFFFF
        ",
    ),
    (
        "Balancing and optimizing",
        "
        FFFFFFDFFFFFF
        FEWWWTWEWWWTF
        FTWEFTEFFTWTF
        DTFTWWBWWTFTD
        FTWTFFFTFEWTF
        FTWWWEWTWWWEF
        FFFFFFDFFFFFF
        ",
    ),
    (
        "Bordered, deeper structure",
        "
        WWWWWFDFWWWWW
        FFWWWFWFWWWFF
        FFWFFFFFFFWFF
        DFFFWWFWWFFFD
        FFWFFFFFFFWFF
        FFWWWFWFWWWFF
        WWWWWFDFWWWWW
        ",
    ),
    (
        "Main structural shapes",
        "
        FFFFFFDFFFFFF
        FFWWFFFFFWWFF
        FFWFFFFFFFWFF
        DFFFFFFFFFFFD
        FFWFFFFFFFWFF
        FFWWFFFFFWWFF
        FFFFFFDFFFFFF
        ",
    ),
    (
        "Dense, disorganized",
        "
        WWWWWFDFWWWWW
        FEWWWTWEWWWTF
        FTWEFTEFFTWTF
        DTFTWWBWWTFTD
        FTWTFFFTFEWTF
        FTWWWEWTWWWEF
        WWWWWFDFWWWWW
        ",
    ),
    (
        "High challenge, clear goal",
        "
        WWWWWFDFWWWWW
        FEWWWFWFWWWTF
        FFWFFTEFFFWFF
        DTFTWWBWWTFTD
        FFWFFFFTFFWFF
        FTWWWFWFWWWEF
        WWWWWFDFWWWWW
        ",
    ),
    (
        "Chamber separation, forced encounter",
        "
        FFFFFFDFFFFFF
        FFWWWTWEWWWFF
        FTWEFFFFFTWTF
        DFFFWWFWWFFFD
        FTWTFFFFFEWTF
        FFWWWEWTWWWFF
        FFFFFFDFFFFFF
        ",
    ),
];
