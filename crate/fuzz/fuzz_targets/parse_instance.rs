#![no_main]

use libfuzzer_sys::fuzz_target;
use solidarity::{redistribute, Instance, ParticipationProfile};

fuzz_target!(|data: &[u8]| {
    let Ok(instance) = Instance::from_json_slice(data) else {
        return;
    };
    // Anything that validates must also clear without panicking. Keep the
    // LP small so each input stays fast.
    if instance.node_count() > 4 || instance.edge_count() > 6 {
        return;
    }
    let full = ParticipationProfile::new(
        instance
            .network
            .nodes
            .iter()
            .map(|n| n.demand.total_quantity())
            .collect(),
    );
    let Ok(full) = full else {
        return;
    };
    for s in &instance.scenarios {
        let _ = redistribute(&instance, s, &full);
    }
});
