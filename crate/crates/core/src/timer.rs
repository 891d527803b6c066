//! Wall-clock timing; reports zero without the `std` feature.

#[cfg(feature = "std")]
pub(crate) struct Timer(std::time::Instant);

#[cfg(feature = "std")]
impl Timer {
    pub(crate) fn start() -> Self {
        Timer(std::time::Instant::now())
    }

    pub(crate) fn seconds(&self) -> f64 {
        self.0.elapsed().as_secs_f64()
    }
}

#[cfg(not(feature = "std"))]
pub(crate) struct Timer;

#[cfg(not(feature = "std"))]
impl Timer {
    pub(crate) fn start() -> Self {
        Timer
    }

    pub(crate) fn seconds(&self) -> f64 {
        0.0
    }
}
