//! View capture for the VLM backend.
//!
//! [`RasterCapturer`] is a headless stand-in for an engine screenshot: it ray
//! casts the object boxes with flat shading and stamps each visible object's
//! name over it in a small bitmap font.

use crate::anchors::{AnchorPoint, ViewKey};
use crate::geometry::{facing, Vec3};
use crate::scene::Scene;
use image::{Rgb, RgbImage};
use std::hash::{Hash, Hasher};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CaptureError {
    #[error("capture of {view} failed: {reason}")]
    Render { view: ViewKey, reason: String },
}

/// One captured view ready to send to a describer.
#[derive(Debug, Clone)]
pub struct CaptureRequest {
    pub view: ViewKey,
    pub image: RgbImage,
}

impl CaptureRequest {
    pub fn new(view: ViewKey, image: RgbImage) -> Result<Self, CaptureError> {
        if image.width() == 0 || image.height() == 0 {
            return Err(CaptureError::Render {
                view,
                reason: "empty image".into(),
            });
        }
        Ok(CaptureRequest { view, image })
    }

    /// PNG encoding of the image.
    pub fn png_bytes(&self) -> Vec<u8> {
        let mut out = std::io::Cursor::new(Vec::new());
        self.image
            .write_to(&mut out, image::ImageFormat::Png)
            .expect("PNG encoding into memory");
        out.into_inner()
    }
}

/// Produces an image of the scene as seen from an anchor at a preset yaw.
pub trait ViewCapturer: Sync {
    fn capture(
        &self,
        scene: &Scene,
        anchor: &AnchorPoint,
        view: ViewKey,
    ) -> Result<CaptureRequest, CaptureError>;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RasterCapturer {
    pub width: u32,
    pub height: u32,
    pub horizontal_fov: f64,
    pub label_scale: u32,
}

impl Default for RasterCapturer {
    fn default() -> Self {
        RasterCapturer {
            width: 1024,
            height: 768,
            horizontal_fov: 90.0,
            label_scale: 2,
        }
    }
}

struct Camera {
    eye: Vec3,
    forward: Vec3,
    right: Vec3,
    up: Vec3,
    tan_x: f64,
    tan_y: f64,
}

impl Camera {
    fn new(eye: Vec3, yaw: f64, hfov: f64, aspect: f64) -> Self {
        let r = yaw.to_radians();
        let tan_x = (hfov.to_radians() / 2.0).tan();
        Camera {
            eye,
            forward: facing(yaw),
            right: Vec3::new(r.cos(), 0.0, -r.sin()),
            up: Vec3::new(0.0, 1.0, 0.0),
            tan_x,
            tan_y: tan_x / aspect,
        }
    }

    fn ray(&self, u: f64, v: f64) -> Vec3 {
        self.forward + self.right * (u * self.tan_x) + self.up * (v * self.tan_y)
    }

    /// Screen position in `[0,1]²` (y down) if the point is in front.
    fn project(&self, p: Vec3) -> Option<(f64, f64)> {
        let d = p - self.eye;
        let z = d.dot(self.forward);
        if z <= 1e-6 {
            return None;
        }
        let u = d.dot(self.right) / z / self.tan_x;
        let v = d.dot(self.up) / z / self.tan_y;
        ((-1.0..=1.0).contains(&u) && (-1.0..=1.0).contains(&v))
            .then(|| ((u + 1.0) / 2.0, (1.0 - v) / 2.0))
    }
}

fn object_color(id: &str) -> [f64; 3] {
    let mut h = std::collections::hash_map::DefaultHasher::new();
    id.hash(&mut h);
    let bits = h.finish();
    let c = |shift: u32| 70.0 + ((bits >> shift) & 0x7f) as f64 * 1.4;
    [c(0), c(8), c(16)]
}

impl RasterCapturer {
    pub fn render(&self, scene: &Scene, eye: Vec3, yaw: f64) -> RgbImage {
        let (w, h) = (self.width, self.height);
        let cam = Camera::new(eye, yaw, self.horizontal_fov, w as f64 / h as f64);
        let boxes: Vec<_> = scene
            .objects
            .iter()
            .filter(|o| o.renderable)
            .map(|o| (o.bounds(), object_color(&o.id)))
            .collect();
        let mut img = RgbImage::new(w, h);
        for py in 0..h {
            for px in 0..w {
                let u = 2.0 * (px as f64 + 0.5) / w as f64 - 1.0;
                let v = 1.0 - 2.0 * (py as f64 + 0.5) / h as f64;
                let dir = cam.ray(u, v);
                let hit = boxes
                    .iter()
                    .filter_map(|(b, c)| b.ray_hit(eye, dir).map(|t| (t, b, c)))
                    .min_by(|a, b| a.0.total_cmp(&b.0));
                let rgb = match hit {
                    Some((t, b, c)) => {
                        let p = eye + dir * t;
                        // which face was hit decides the flat shade
                        let faces = [
                            ((p.x - b.min.x).abs().min((p.x - b.max.x).abs()), 0.8),
                            ((p.y - b.min.y).abs().min((p.y - b.max.y).abs()), 1.0),
                            ((p.z - b.min.z).abs().min((p.z - b.max.z).abs()), 0.6),
                        ];
                        let shade = faces
                            .iter()
                            .min_by(|a, b| a.0.total_cmp(&b.0))
                            .map_or(1.0, |f| f.1);
                        [c[0] * shade, c[1] * shade, c[2] * shade]
                    }
                    None if dir.y >= 0.0 => [200.0, 210.0, 225.0],
                    None => [120.0, 115.0, 110.0],
                };
                img.put_pixel(px, py, Rgb(rgb.map(|x| x.clamp(0.0, 255.0) as u8)));
            }
        }
        for o in scene.objects.iter().filter(|o| o.renderable) {
            if let Some((sx, sy)) = cam.project(o.position) {
                let x = (sx * w as f64) as i64;
                let y = (sy * h as f64) as i64;
                draw_label(
                    &mut img,
                    &o.name.to_uppercase(),
                    x,
                    y,
                    self.label_scale.max(1),
                );
            }
        }
        img
    }
}

impl ViewCapturer for RasterCapturer {
    fn capture(
        &self,
        scene: &Scene,
        anchor: &AnchorPoint,
        view: ViewKey,
    ) -> Result<CaptureRequest, CaptureError> {
        if self.width == 0
            || self.height == 0
            || !(self.horizontal_fov > 0.0 && self.horizontal_fov < 180.0)
        {
            return Err(CaptureError::Render {
                view,
                reason: "invalid capturer settings".into(),
            });
        }
        let img = self.render(scene, anchor.position, view.yaw() as f64);
        CaptureRequest::new(view, img)
    }
}

const GLYPH_W: i64 = 5;
const GLYPH_H: i64 = 7;

fn glyph(c: char) -> [u8; 7] {
    match c {
        'A' => [0x0E, 0x11, 0x11, 0x1F, 0x11, 0x11, 0x11],
        'B' => [0x1E, 0x11, 0x11, 0x1E, 0x11, 0x11, 0x1E],
        'C' => [0x0E, 0x11, 0x10, 0x10, 0x10, 0x11, 0x0E],
        'D' => [0x1E, 0x11, 0x11, 0x11, 0x11, 0x11, 0x1E],
        'E' => [0x1F, 0x10, 0x10, 0x1E, 0x10, 0x10, 0x1F],
        'F' => [0x1F, 0x10, 0x10, 0x1E, 0x10, 0x10, 0x10],
        'G' => [0x0E, 0x11, 0x10, 0x17, 0x11, 0x11, 0x0F],
        'H' => [0x11, 0x11, 0x11, 0x1F, 0x11, 0x11, 0x11],
        'I' => [0x0E, 0x04, 0x04, 0x04, 0x04, 0x04, 0x0E],
        'J' => [0x07, 0x02, 0x02, 0x02, 0x02, 0x12, 0x0C],
        'K' => [0x11, 0x12, 0x14, 0x18, 0x14, 0x12, 0x11],
        'L' => [0x10, 0x10, 0x10, 0x10, 0x10, 0x10, 0x1F],
        'M' => [0x11, 0x1B, 0x15, 0x15, 0x11, 0x11, 0x11],
        'N' => [0x11, 0x11, 0x19, 0x15, 0x13, 0x11, 0x11],
        'O' => [0x0E, 0x11, 0x11, 0x11, 0x11, 0x11, 0x0E],
        'P' => [0x1E, 0x11, 0x11, 0x1E, 0x10, 0x10, 0x10],
        'Q' => [0x0E, 0x11, 0x11, 0x11, 0x15, 0x12, 0x0D],
        'R' => [0x1E, 0x11, 0x11, 0x1E, 0x14, 0x12, 0x11],
        'S' => [0x0F, 0x10, 0x10, 0x0E, 0x01, 0x01, 0x1E],
        'T' => [0x1F, 0x04, 0x04, 0x04, 0x04, 0x04, 0x04],
        'U' => [0x11, 0x11, 0x11, 0x11, 0x11, 0x11, 0x0E],
        'V' => [0x11, 0x11, 0x11, 0x11, 0x11, 0x0A, 0x04],
        'W' => [0x11, 0x11, 0x11, 0x15, 0x15, 0x15, 0x0A],
        'X' => [0x11, 0x11, 0x0A, 0x04, 0x0A, 0x11, 0x11],
        'Y' => [0x11, 0x11, 0x0A, 0x04, 0x04, 0x04, 0x04],
        'Z' => [0x1F, 0x01, 0x02, 0x04, 0x08, 0x10, 0x1F],
        '0' => [0x0E, 0x11, 0x13, 0x15, 0x19, 0x11, 0x0E],
        '1' => [0x04, 0x0C, 0x04, 0x04, 0x04, 0x04, 0x0E],
        '2' => [0x0E, 0x11, 0x01, 0x02, 0x04, 0x08, 0x1F],
        '3' => [0x1F, 0x02, 0x04, 0x02, 0x01, 0x11, 0x0E],
        '4' => [0x02, 0x06, 0x0A, 0x12, 0x1F, 0x02, 0x02],
        '5' => [0x1F, 0x10, 0x1E, 0x01, 0x01, 0x11, 0x0E],
        '6' => [0x06, 0x08, 0x10, 0x1E, 0x11, 0x11, 0x0E],
        '7' => [0x1F, 0x01, 0x02, 0x04, 0x08, 0x08, 0x08],
        '8' => [0x0E, 0x11, 0x11, 0x0E, 0x11, 0x11, 0x0E],
        '9' => [0x0E, 0x11, 0x11, 0x0F, 0x01, 0x02, 0x0C],
        '-' => [0x00, 0x00, 0x00, 0x1F, 0x00, 0x00, 0x00],
        '.' => [0x00, 0x00, 0x00, 0x00, 0x00, 0x0C, 0x0C],
        ' ' => [0x00; 7],
        _ => [0x0E, 0x11, 0x01, 0x02, 0x04, 0x00, 0x04],
    }
}

/// Draws `text` centred on (cx, cy) on a white plate, clipped to the image.
fn draw_label(img: &mut RgbImage, text: &str, cx: i64, cy: i64, scale: u32) {
    let s = scale as i64;
    let n = text.chars().count() as i64;
    let tw = n * (GLYPH_W + 1) * s - s;
    let th = GLYPH_H * s;
    let (x0, y0) = (cx - tw / 2, cy - th / 2);
    let mut put = |x: i64, y: i64, c: [u8; 3]| {
        if x >= 0 && y >= 0 && (x as u32) < img.width() && (y as u32) < img.height() {
            img.put_pixel(x as u32, y as u32, Rgb(c));
        }
    };
    for y in (y0 - s)..(y0 + th + s) {
        for x in (x0 - s)..(x0 + tw + s) {
            put(x, y, [255, 255, 255]);
        }
    }
    for (i, ch) in text.chars().enumerate() {
        let rows = glyph(ch);
        let gx = x0 + i as i64 * (GLYPH_W + 1) * s;
        for (ry, row) in rows.iter().enumerate() {
            for rx in 0..GLYPH_W {
                if row & (0x10 >> rx) != 0 {
                    for dy in 0..s {
                        for dx in 0..s {
                            put(gx + rx * s + dx, y0 + ry as i64 * s + dy, [0, 0, 0]);
                        }
                    }
                }
            }
        }
    }
}
