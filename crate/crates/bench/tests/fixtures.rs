use dynrefl_bench::fixture;

#[test]
fn benchmark_fixtures_build() {
    for (name, rank, sites) in [
        ("diagonal_dressed", 2, 1),
        ("diagonal_dressed", 3, 1),
        ("constant_g", 2, 1),
        ("diagonal_dressed", 2, 2),
    ] {
        let (inst, pts) = fixture(name, rank, sites, 4).unwrap();
        assert_eq!(inst.rank(), rank);
        assert_eq!(pts.len(), 4);
    }
}
