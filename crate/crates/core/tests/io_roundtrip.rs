use hexpack::fixtures;
use hexpack::geometry::{pyramid_boundary_coords, subdivide_embedding};
use hexpack::hexmodel::{check_conformity, extract_boundary, subdivide_hex};
use hexpack::io::{export_vtk, parse_coords, parse_mesh, parse_pattern, parse_vtk, write_coords, write_mesh, write_pattern};
use hexpack::surface::pyramid16_pattern;
use hexpack::canonical_code;

#[test]
fn mesh_documents_round_trip() {
    for doc in [fixtures::pyramid36(), fixtures::template17(), fixtures::template18()] {
        let text = write_mesh(&doc.complex, doc.embedding.as_ref());
        let back = parse_mesh(&text).unwrap();
        assert_eq!(back.complex, doc.complex);
        assert_eq!(back.embedding, doc.embedding);
    }
}

#[test]
fn vtk_round_trip_of_subdivided_pyramid() {
    let doc = fixtures::pyramid36();
    let fine = subdivide_hex(&doc.complex);
    let e = subdivide_embedding(&doc.complex, &fine, doc.embedding.as_ref().unwrap()).unwrap();
    assert!(check_conformity(&fine).is_conforming());
    let grid = parse_vtk(&export_vtk(&fine, &e).unwrap()).unwrap();
    assert_eq!(grid.hexes, fine.raw_hexes());
    assert_eq!(grid.points, e.points());
}

#[test]
fn pattern_and_coords_round_trip() {
    let p = pyramid16_pattern();
    let back = parse_pattern(&write_pattern(&p)).unwrap();
    assert_eq!(canonical_code(&back, false), canonical_code(&p, false));
    let b = extract_boundary(&fixtures::template18().complex).unwrap();
    assert_eq!(parse_pattern(&write_pattern(&b)).unwrap().quads(), b.quads());

    let coords = pyramid_boundary_coords();
    assert_eq!(parse_coords(&write_coords(&coords)).unwrap(), coords);
}
