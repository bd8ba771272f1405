//! "Where is the brew button?": steer the hand toward the target and print
//! the beeps, direction phrases, haptic pulse and grab confirmation.

use envision::guidance::{GuidanceConfig, GuidanceSession, HandPose};
use envision::scene::object_lookup;
use envision::{Payload, Pose, Vec3};

fn main() -> anyhow::Result<()> {
    let scene = envision::demo::escape_room();
    let target = object_lookup(&scene, "brew buton")?.clone();
    println!("locating {} ({})", target.name, target.id);

    let user = Pose::new(Vec3::new(0.0, 1.6, 0.0), 90.0);
    let start = Vec3::new(0.0, 1.0, -0.5);
    let mut guide = GuidanceSession::new(target.id.clone(), GuidanceConfig::default(), 0.0)?;
    let dt = 0.05;
    for step in 1..=70 {
        // 0.8 m/s straight at the button, stopping on it
        let t = step as f64 * dt;
        let along = (t * 0.8 / start.distance(target.position)).min(1.0);
        let hand = HandPose::new(start.lerp(target.position, along));
        for e in guide.tick(dt, &user, &hand, &scene)? {
            match &e.payload {
                Payload::Beep { rate, pan } => println!(
                    "{:6.2}s beep  {rate:.2} Hz  pan {:.2}/{:.2}",
                    e.t, pan.left, pan.right
                ),
                Payload::Speech { text, .. } => println!("{:6.2}s say   {text}", e.t),
                Payload::Haptic {
                    amplitude,
                    duration_ms,
                } => {
                    println!("{:6.2}s buzz  {amplitude} for {duration_ms} ms", e.t)
                }
                Payload::Tone { .. } => {}
            }
        }
    }
    let grab = guide.notify_grab(&target);
    match grab {
        Ok(e) => println!("{:6.2}s say   {}", e.t, e.speech_text().unwrap_or_default()),
        Err(e) => println!("grab refused: {e}"),
    }
    Ok(())
}
