//! "What is near me?": the three most important objects, each with a panned
//! tone. Repeating the command rotates through objects as announced ones decay.

use envision::feedback::stereo_pan;
use envision::interpreter::{main_objects, AnnouncementHistory, DEFAULT_DECAY};
use envision::{Pose, Vec3};

fn main() -> anyhow::Result<()> {
    let scene = envision::demo::escape_room();
    let user = Pose::new(Vec3::new(1.5, 1.6, -1.5), 45.0);
    let mut history = AnnouncementHistory::new();
    for round in 1..=3 {
        println!("round {round}");
        let picks = main_objects(&scene, &user, &history, 3, DEFAULT_DECAY)?;
        for a in &picks {
            let pan = stereo_pan(a.azimuth);
            println!(
                "  {:<15} score {:.3}  azimuth {:>7.1}  elevation {:>6.1}  pan L {:.2} R {:.2}",
                a.object.name, a.score, a.azimuth, a.elevation, pan.left, pan.right
            );
        }
        for a in &picks {
            history.record(&a.object.id);
        }
    }
    Ok(())
}
