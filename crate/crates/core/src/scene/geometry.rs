use crate::error::{Result, TadError};

/// Which microphone pair a differential beamformer runs on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    /// Mics 1 and 2 (indices 0 and 1).
    Left,
    /// Mics 3 and 4 (indices 2 and 3).
    Right,
}

impl Side {
    /// Channel indices of the (front, back) microphones on this side.
    pub fn pair(self) -> (usize, usize) {
        match self {
            Side::Left => (0, 1),
            Side::Right => (2, 3),
        }
    }
}

/// Four microphones in the horizontal plane, two on each side of a head.
///
/// Coordinates are in meters: `x` points to the right pair, `y` to the front.
/// Azimuths are measured from the front (`+y`), positive towards `+x`.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrayGeometry {
    mic_positions: [[f64; 2]; 4],
    speed_of_sound: f64,
    sample_rate: u32,
}

impl ArrayGeometry {
    pub fn new(mic_positions: [[f64; 2]; 4], speed_of_sound: f64, sample_rate: u32) -> Result<Self> {
        if sample_rate == 0 {
            return Err(TadError::invalid("sample_rate must be positive"));
        }
        if !(speed_of_sound > 0.0) || !speed_of_sound.is_finite() {
            return Err(TadError::invalid("speed_of_sound must be positive"));
        }
        if mic_positions.iter().flatten().any(|v| !v.is_finite()) {
            return Err(TadError::invalid("microphone coordinates must be finite"));
        }
        let dist = |a: usize, b: usize| {
            let [ax, ay] = mic_positions[a];
            let [bx, by] = mic_positions[b];
            (ax - bx).hypot(ay - by)
        };
        let inter = dist(0, 2);
        if dist(0, 1) <= 0.0 || dist(2, 3) <= 0.0 {
            return Err(TadError::invalid("microphones within a pair must not coincide"));
        }
        if dist(0, 1) >= inter || dist(2, 3) >= inter {
            return Err(TadError::invalid("pair spacing must be smaller than inter-pair spacing"));
        }
        Ok(ArrayGeometry { mic_positions, speed_of_sound, sample_rate })
    }

    /// Behind-the-ear layout: pairs at x = -/+0.09 m, 15 mm front/back spacing,
    /// c = 343 m/s, 16 kHz.
    pub fn behind_the_ear() -> Self {
        let half_width = 0.09;
        let half_pair = 0.0075;
        ArrayGeometry {
            mic_positions: [
                [-half_width, half_pair],
                [-half_width, -half_pair],
                [half_width, half_pair],
                [half_width, -half_pair],
            ],
            speed_of_sound: 343.0,
            sample_rate: 16_000,
        }
    }

    pub fn with_sample_rate(mut self, sample_rate: u32) -> Result<Self> {
        if sample_rate == 0 {
            return Err(TadError::invalid("sample_rate must be positive"));
        }
        self.sample_rate = sample_rate;
        Ok(self)
    }

    pub fn mic_positions(&self) -> &[[f64; 2]; 4] {
        &self.mic_positions
    }

    pub fn speed_of_sound(&self) -> f64 {
        self.speed_of_sound
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn fs(&self) -> f64 {
        f64::from(self.sample_rate)
    }

    /// Distance between mics 1 and 3.
    pub fn d13(&self) -> f64 {
        let [ax, ay] = self.mic_positions[0];
        let [bx, by] = self.mic_positions[2];
        (ax - bx).hypot(ay - by)
    }

    /// Front-to-back spacing of the pair on `side`.
    pub fn pair_spacing(&self, side: Side) -> f64 {
        let (f, b) = side.pair();
        let [ax, ay] = self.mic_positions[f];
        let [bx, by] = self.mic_positions[b];
        (ax - bx).hypot(ay - by)
    }

    /// Far-field arrival delay of mic `mic` relative to the array origin, in
    /// samples, for a plane wave from azimuth `doa_deg`. Negative means the
    /// wavefront reaches the microphone before the origin.
    pub fn arrival_delay_samples(&self, mic: usize, doa_deg: f64) -> f64 {
        let theta = doa_deg.to_radians();
        let [x, y] = self.mic_positions[mic];
        let projection = x * theta.sin() + y * theta.cos();
        -projection / self.speed_of_sound * self.fs()
    }
}

impl Default for ArrayGeometry {
    fn default() -> Self {
        Self::behind_the_ear()
    }
}
