//! Shared domain types: LiDAR point clouds, camera images, sensor
//! calibration, and the per-timestamp sample bundle that ties them together.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// The six camera slots of a sample, in canonical order.
///
/// Slot order matters: bundle-level corruption kernels draw one random
/// decision per slot in this order, so reordering would change outputs.
pub const CAMERA_NAMES: [&str; 6] = [
    "CAM_FRONT",
    "CAM_FRONT_LEFT",
    "CAM_FRONT_RIGHT",
    "CAM_BACK",
    "CAM_BACK_LEFT",
    "CAM_BACK_RIGHT",
];

/// One LiDAR return: position in the sensor frame, reflectance in
/// `[0, 255]`, and the beam (ring) index in `[0, 31]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointRecord {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub intensity: f64,
    pub ring: u8,
}

impl PointRecord {
    /// Euclidean distance from the sensor origin.
    pub fn range(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }
}

/// An ordered sequence of LiDAR returns. An empty cloud is valid.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PointCloud {
    pub points: Vec<PointRecord>,
}

impl PointCloud {
    pub fn new(points: Vec<PointRecord>) -> Self {
        Self { points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, PointRecord> {
        self.points.iter()
    }
}

/// Row-major 8-bit RGB raster.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageBuffer {
    width: u32,
    height: u32,
    pixels: Vec<u8>,
}

impl ImageBuffer {
    /// Zero-filled (black) image.
    pub fn new(width: u32, height: u32) -> Self {
        assert!(width > 0 && height > 0, "image dimensions must be positive");
        Self {
            width,
            height,
            pixels: vec![0; width as usize * height as usize * 3],
        }
    }

    pub fn from_pixels(width: u32, height: u32, pixels: Vec<u8>) -> Self {
        assert!(width > 0 && height > 0, "image dimensions must be positive");
        assert_eq!(
            pixels.len(),
            width as usize * height as usize * 3,
            "pixel buffer length must be width * height * 3"
        );
        Self {
            width,
            height,
            pixels,
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn pixels_mut(&mut self) -> &mut [u8] {
        &mut self.pixels
    }

    pub fn get(&self, x: u32, y: u32) -> [u8; 3] {
        let i = self.index(x, y);
        [self.pixels[i], self.pixels[i + 1], self.pixels[i + 2]]
    }

    pub fn set(&mut self, x: u32, y: u32, rgb: [u8; 3]) {
        let i = self.index(x, y);
        self.pixels[i..i + 3].copy_from_slice(&rgb);
    }

    fn index(&self, x: u32, y: u32) -> usize {
        debug_assert!(x < self.width && y < self.height);
        (y as usize * self.width as usize + x as usize) * 3
    }
}

/// Channel byte to normalized `[0, 1]` value.
pub fn unit_from_byte(b: u8) -> f64 {
    f64::from(b) / 255.0
}

/// Normalized value back to a channel byte.
///
/// Uses floor quantization with a one-ulp-scale nudge so that values that
/// are exact byte multiples (identity transforms) survive the round trip.
pub fn quantize_unit(v: f64) -> u8 {
    let v = v.clamp(0.0, 1.0);
    (v * 255.0 + 1e-6).floor() as u8
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CalibrationError {
    #[error("quaternion norm {0} outside 1 +/- 1e-6")]
    QuaternionNorm(f64),
    #[error("camera calibration is missing an intrinsic matrix")]
    MissingIntrinsic,
    #[error("invalid intrinsic matrix: {0}")]
    BadIntrinsic(&'static str),
}

/// Rigid sensor-to-vehicle transform, plus the pinhole matrix for cameras.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    /// Unit quaternion `(w, x, y, z)`, sensor to vehicle.
    pub rotation: [f64; 4],
    /// Translation in meters, sensor to vehicle.
    pub translation: [f64; 3],
    /// Row-major 3x3 camera matrix; `None` for non-camera sensors.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub intrinsic: Option<[[f64; 3]; 3]>,
}

impl Calibration {
    /// Identity extrinsics with no intrinsic matrix.
    pub fn identity() -> Self {
        Self {
            rotation: [1.0, 0.0, 0.0, 0.0],
            translation: [0.0, 0.0, 0.0],
            intrinsic: None,
        }
    }

    pub fn validate(&self) -> Result<(), CalibrationError> {
        let [w, x, y, z] = self.rotation;
        let norm = (w * w + x * x + y * y + z * z).sqrt();
        if (norm - 1.0).abs() > 1e-6 {
            return Err(CalibrationError::QuaternionNorm(norm));
        }
        if let Some(k) = &self.intrinsic {
            if !(k[0][0] > 0.0 && k[1][1] > 0.0) {
                return Err(CalibrationError::BadIntrinsic("focal entries must be positive"));
            }
            if k[1][0] != 0.0 || k[2][0] != 0.0 || k[2][1] != 0.0 {
                return Err(CalibrationError::BadIntrinsic(
                    "lower-left entries must be zero",
                ));
            }
            if k[2][2] != 1.0 {
                return Err(CalibrationError::BadIntrinsic("bottom-right entry must be 1"));
            }
        }
        Ok(())
    }

    /// Rotation matrix of the (normalized) quaternion.
    pub fn rotation_matrix(&self) -> [[f64; 3]; 3] {
        let [w, x, y, z] = self.rotation;
        let n = (w * w + x * x + y * y + z * z).sqrt();
        let (w, x, y, z) = (w / n, x / n, y / n, z / n);
        [
            [
                1.0 - 2.0 * (y * y + z * z),
                2.0 * (x * y - w * z),
                2.0 * (x * z + w * y),
            ],
            [
                2.0 * (x * y + w * z),
                1.0 - 2.0 * (x * x + z * z),
                2.0 * (y * z - w * x),
            ],
            [
                2.0 * (x * z - w * y),
                2.0 * (y * z + w * x),
                1.0 - 2.0 * (x * x + y * y),
            ],
        ]
    }

    /// Sensor-frame point to vehicle frame.
    pub fn sensor_to_vehicle(&self, p: [f64; 3]) -> [f64; 3] {
        let r = self.rotation_matrix();
        [
            r[0][0] * p[0] + r[0][1] * p[1] + r[0][2] * p[2] + self.translation[0],
            r[1][0] * p[0] + r[1][1] * p[1] + r[1][2] * p[2] + self.translation[1],
            r[2][0] * p[0] + r[2][1] * p[1] + r[2][2] * p[2] + self.translation[2],
        ]
    }

    /// Vehicle-frame point to sensor frame (inverse rigid transform).
    pub fn vehicle_to_sensor(&self, p: [f64; 3]) -> [f64; 3] {
        let r = self.rotation_matrix();
        let d = [
            p[0] - self.translation[0],
            p[1] - self.translation[1],
            p[2] - self.translation[2],
        ];
        // R is orthonormal, so the inverse is the transpose.
        [
            r[0][0] * d[0] + r[1][0] * d[1] + r[2][0] * d[2],
            r[0][1] * d[0] + r[1][1] * d[1] + r[2][1] * d[2],
            r[0][2] * d[0] + r[1][2] * d[1] + r[2][2] * d[2],
        ]
    }
}

/// A camera slot's payload: either a decoded frame or the explicit marker
/// that the frame was dropped. Absent slots keep their dimensions so the
/// on-disk placeholder can be materialized with the right size.
#[derive(Debug, Clone, PartialEq)]
pub enum CameraFrame {
    Present(ImageBuffer),
    Absent { width: u32, height: u32 },
}

impl CameraFrame {
    pub fn is_absent(&self) -> bool {
        matches!(self, CameraFrame::Absent { .. })
    }

    pub fn image(&self) -> Option<&ImageBuffer> {
        match self {
            CameraFrame::Present(img) => Some(img),
            CameraFrame::Absent { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CameraData {
    pub name: String,
    pub frame: CameraFrame,
    pub calib: Calibration,
}

/// One timestamped sample: a point cloud plus six camera slots and their
/// calibrations, linked to its in-scene predecessor when one exists.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleBundle {
    pub sample_id: String,
    pub scene_id: String,
    pub timestamp_us: i64,
    pub prev_sample_id: Option<String>,
    pub lidar: PointCloud,
    pub lidar_calib: Calibration,
    /// Exactly six entries, in [`CAMERA_NAMES`] slot order.
    pub cameras: Vec<CameraData>,
}

impl SampleBundle {
    pub fn camera(&self, name: &str) -> Option<&CameraData> {
        self.cameras.iter().find(|c| c.name == name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantize_is_identity_on_byte_grid() {
        for b in 0..=255u8 {
            assert_eq!(quantize_unit(unit_from_byte(b)), b, "byte {b}");
        }
    }

    #[test]
    fn quantize_clamps() {
        assert_eq!(quantize_unit(-0.3), 0);
        assert_eq!(quantize_unit(1.7), 255);
        assert_eq!(quantize_unit(1.0), 255);
        assert_eq!(quantize_unit(0.0), 0);
    }

    #[test]
    fn rotation_matrix_identity() {
        let c = Calibration::identity();
        let p = [1.5, -2.0, 0.25];
        assert_eq!(c.sensor_to_vehicle(p), p);
        assert_eq!(c.vehicle_to_sensor(p), p);
    }

    #[test]
    fn sensor_vehicle_round_trip() {
        // 90 degrees about z plus an offset.
        let half = std::f64::consts::FRAC_PI_4;
        let c = Calibration {
            rotation: [half.cos(), 0.0, 0.0, half.sin()],
            translation: [1.0, 2.0, 3.0],
            intrinsic: None,
        };
        c.validate().unwrap();
        let p = [0.3, -0.7, 1.1];
        let v = c.sensor_to_vehicle(p);
        let back = c.vehicle_to_sensor(v);
        for i in 0..3 {
            assert!((back[i] - p[i]).abs() < 1e-12);
        }
        // x axis maps to y axis under a +90 degree z rotation.
        let e = c.sensor_to_vehicle([1.0, 0.0, 0.0]);
        assert!((e[0] - 1.0).abs() < 1e-12);
        assert!((e[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn calibration_validation_rejects_bad_quaternion() {
        let mut c = Calibration::identity();
        c.rotation = [0.9, 0.0, 0.0, 0.0];
        assert!(matches!(
            c.validate(),
            Err(CalibrationError::QuaternionNorm(_))
        ));
    }

    #[test]
    fn calibration_validation_rejects_bad_intrinsic() {
        let mut c = Calibration::identity();
        c.intrinsic = Some([[800.0, 0.0, 320.0], [0.0, 800.0, 240.0], [0.0, 0.0, 2.0]]);
        assert!(matches!(
            c.validate(),
            Err(CalibrationError::BadIntrinsic(_))
        ));
    }
}
