/// Fixed 16-color palette cycled by segment id when writing labeled meshes.
/// Boundary faces use [`BOUNDARY_COLOR`] (black).
pub const PALETTE: [[u8; 3]; 16] = [
    [230, 25, 75],   // red
    [60, 180, 75],   // green
    [255, 225, 25],  // yellow
    [0, 130, 200],   // blue
    [245, 130, 48],  // orange
    [145, 30, 180],  // purple
    [70, 240, 240],  // cyan
    [240, 50, 230],  // magenta
    [210, 245, 60],  // lime
    [250, 190, 212], // pink
    [0, 128, 128],   // teal
    [220, 190, 255], // lavender
    [170, 110, 40],  // brown
    [255, 250, 200], // beige
    [128, 0, 0],     // maroon
    [170, 255, 195], // mint
];

/// Face color for boundary faces in labeled PLY output.
pub const BOUNDARY_COLOR: [u8; 3] = [0, 0, 0];
