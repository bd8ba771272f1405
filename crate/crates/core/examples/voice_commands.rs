//! The three-command grammar and the fuzzy object-name ladder behind
//! "Where is the ...?".

use envision::interpreter::{parse_command, Command};
use envision::scene::object_lookup_with;

fn main() {
    let scene = envision::demo::escape_room();
    let utterances = [
        "Where am I?",
        "what's near me",
        "Where is the key?",
        "Where's the floor lamp",
        "where is the bre button",
        "where is the coffee",
        "where is the spaceship",
        "open the door",
    ];
    for u in utterances {
        match parse_command(u) {
            Ok(Command::Locate(name)) => match object_lookup_with(&scene, &name, 0.34) {
                Ok((o, rung)) => println!("{u:<28} locate {name:?} -> {} via {rung:?}", o.id),
                Err(e) => println!("{u:<28} locate {name:?} -> {e}"),
            },
            Ok(cmd) => println!("{u:<28} {cmd:?}"),
            Err(e) => println!("{u:<28} {e}"),
        }
    }
}
