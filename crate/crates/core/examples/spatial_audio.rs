//! Head-relative bearings and the equal-power stereo law used for tones and
//! beeps.

use envision::feedback::{relative_bearing, stereo_pan, FeedbackEvent};
use envision::{Pose, Vec3};

fn main() -> anyhow::Result<()> {
    let user = Pose::new(Vec3::new(0.0, 1.6, 0.0), 0.0);
    for (label, target) in [
        ("ahead", [0.0, 1.6, 2.0]),
        ("right", [2.0, 1.6, 0.0]),
        ("ahead-left, low", [-1.0, 0.4, 1.0]),
        ("behind", [0.0, 1.6, -2.0]),
        ("overhead", [0.0, 3.0, 0.0]),
    ] {
        let (az, el) = relative_bearing(&user, Vec3::from(target))?;
        let pan = stereo_pan(az);
        println!(
            "{label:<16} azimuth {az:>7.1}  elevation {el:>6.1}  L {:.3}  R {:.3}  L²+R² {:.6}",
            pan.left,
            pan.right,
            pan.left.powi(2) + pan.right.powi(2)
        );
    }
    // the wire form a client plays
    println!(
        "{}",
        serde_json::to_string(&FeedbackEvent::tone(1.25, 90.0, 0.0, 250))?
    );
    Ok(())
}
