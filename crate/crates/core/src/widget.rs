//! Gaze-driven GUI kit: widgets with images and enter/exit/hover callbacks,
//! step-counted timers, and reward injection. Every task is written on top
//! of this.
//!
//! Callbacks receive the task's context `C` and an [`Api`] handle. Structural
//! changes requested from inside a callback (adding or removing widgets and
//! timers, replacing images) are queued and applied at the end of the tick,
//! so dispatch never observes a half-mutated widget list.

use image::{RgbImage, RgbaImage};
use thiserror::Error;

use crate::env::ScreenPoint;
use crate::raster::blend;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WidgetError {
    #[error("widget `{0}` already exists")]
    DuplicateName(String),
    #[error("no widget named `{0}`")]
    UnknownWidget(String),
    #[error("timer `{0}` already exists")]
    DuplicateTimer(String),
    #[error("widget `{name}` rectangle pos={pos:?} size={size:?} is outside the unit screen")]
    OutOfBounds {
        name: String,
        pos: (f64, f64),
        size: (f64, f64),
    },
    #[error("reward amount {0} is not finite")]
    NonFiniteReward(f64),
}

pub type Callback<C> = Box<dyn FnMut(&mut C, &mut Api<C>, &GazeEvent) + Send>;
pub type TimerCallback<C> = Box<dyn FnMut(&mut C, &mut Api<C>) + Send>;

/// Payload handed to enter/exit/hover callbacks.
#[derive(Debug, Clone, PartialEq)]
pub struct GazeEvent {
    pub widget: String,
    pub point: Option<ScreenPoint>,
    /// Ticks spent continuously on the widget since the last enter event.
    pub hover_time: u64,
    pub user_data: String,
}

/// What fired during a tick, in firing order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FiredEvent {
    Enter(String),
    Exit(String),
    Hover { widget: String, hover_time: u64 },
    Timer(String),
}

/// Widget rectangle in texels, half-open.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TexelRect {
    pub x0: u32,
    pub y0: u32,
    pub x1: u32,
    pub y1: u32,
}

impl TexelRect {
    pub fn contains(&self, p: ScreenPoint) -> bool {
        p.x >= f64::from(self.x0)
            && p.x < f64::from(self.x1)
            && p.y >= f64::from(self.y0)
            && p.y < f64::from(self.y1)
    }

    pub fn center(&self) -> ScreenPoint {
        ScreenPoint::new(
            (f64::from(self.x0) + f64::from(self.x1)) / 2.0,
            (f64::from(self.y0) + f64::from(self.y1)) / 2.0,
        )
    }

    pub fn width(&self) -> u32 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> u32 {
        self.y1 - self.y0
    }

    fn intersects(&self, o: &TexelRect) -> bool {
        self.x0 < o.x1 && o.x0 < self.x1 && self.y0 < o.y1 && o.y0 < self.y1
    }
}

/// Declarative widget description; `pos` is the lower-left corner and both
/// `pos` and `size` are fractions of the screen.
pub struct Widget<C> {
    pub name: String,
    pub image: RgbaImage,
    pub pos: (f64, f64),
    pub size: (f64, f64),
    pub on_enter: Option<Callback<C>>,
    pub on_exit: Option<Callback<C>>,
    pub on_hover: Option<Callback<C>>,
    pub user_data: String,
}

impl<C> Widget<C> {
    pub fn new(name: impl Into<String>, image: RgbaImage, pos: (f64, f64), size: (f64, f64)) -> Self {
        Self {
            name: name.into(),
            image,
            pos,
            size,
            on_enter: None,
            on_exit: None,
            on_hover: None,
            user_data: String::new(),
        }
    }

    pub fn on_enter(mut self, f: impl FnMut(&mut C, &mut Api<C>, &GazeEvent) + Send + 'static) -> Self {
        self.on_enter = Some(Box::new(f));
        self
    }

    pub fn on_exit(mut self, f: impl FnMut(&mut C, &mut Api<C>, &GazeEvent) + Send + 'static) -> Self {
        self.on_exit = Some(Box::new(f));
        self
    }

    pub fn on_hover(mut self, f: impl FnMut(&mut C, &mut Api<C>, &GazeEvent) + Send + 'static) -> Self {
        self.on_hover = Some(Box::new(f));
        self
    }

    pub fn user_data(mut self, data: impl Into<String>) -> Self {
        self.user_data = data.into();
        self
    }
}

impl<C> std::fmt::Debug for Widget<C> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Widget")
            .field("name", &self.name)
            .field("pos", &self.pos)
            .field("size", &self.size)
            .field("image", &self.image.dimensions())
            .finish()
    }
}

struct LiveWidget<C> {
    spec: Widget<C>,
    rect: TexelRect,
}

struct Timer<C> {
    name: String,
    remaining: u64,
    callback: TimerCallback<C>,
}

enum Command<C> {
    AddWidget(Widget<C>),
    RemoveWidget(String),
    SetImage(String, RgbaImage),
    AddTimer(String, u64, TimerCallback<C>),
    RemoveTimer(String),
}

/// Handle passed to callbacks: queue structural changes and add reward.
pub struct Api<C> {
    reward: f64,
    queue: Vec<Command<C>>,
}

impl<C> Api<C> {
    fn new() -> Self {
        Self {
            reward: 0.0,
            queue: Vec::new(),
        }
    }

    pub fn add_reward(&mut self, amount: f64) -> Result<(), WidgetError> {
        if !amount.is_finite() {
            return Err(WidgetError::NonFiniteReward(amount));
        }
        self.reward += amount;
        Ok(())
    }

    pub fn add_widget(&mut self, widget: Widget<C>) {
        self.queue.push(Command::AddWidget(widget));
    }

    pub fn remove_widget(&mut self, name: impl Into<String>) {
        self.queue.push(Command::RemoveWidget(name.into()));
    }

    pub fn set_image(&mut self, name: impl Into<String>, image: RgbaImage) {
        self.queue.push(Command::SetImage(name.into(), image));
    }

    pub fn add_timer(
        &mut self,
        name: impl Into<String>,
        timeout: u64,
        f: impl FnMut(&mut C, &mut Api<C>) + Send + 'static,
    ) {
        self.queue
            .push(Command::AddTimer(name.into(), timeout, Box::new(f)));
    }

    pub fn remove_timer(&mut self, name: impl Into<String>) {
        self.queue.push(Command::RemoveTimer(name.into()));
    }
}

/// Where gaze currently rests and for how long.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GazeEventTrace {
    pub current_widget: Option<String>,
    pub hover_time: u64,
}

pub struct WidgetKit<C> {
    screen: RgbImage,
    background: [u8; 3],
    widgets: Vec<LiveWidget<C>>,
    timers: Vec<Timer<C>>,
    trace: GazeEventTrace,
    last_point: Option<ScreenPoint>,
    pending_reward: f64,
    total_reward: f64,
    tick: u64,
}

impl<C> WidgetKit<C> {
    pub fn new(width: u32, height: u32, background: [u8; 3]) -> Self {
        Self {
            screen: RgbImage::from_pixel(width, height, image::Rgb(background)),
            background,
            widgets: Vec::new(),
            timers: Vec::new(),
            trace: GazeEventTrace::default(),
            last_point: None,
            pending_reward: 0.0,
            total_reward: 0.0,
            tick: 0,
        }
    }

    pub fn screen(&self) -> &RgbImage {
        &self.screen
    }

    pub fn trace(&self) -> &GazeEventTrace {
        &self.trace
    }

    pub fn tick_count(&self) -> u64 {
        self.tick
    }

    pub fn widget_names(&self) -> impl Iterator<Item = &str> {
        self.widgets.iter().map(|w| w.spec.name.as_str())
    }

    pub fn has_widget(&self, name: &str) -> bool {
        self.index_of(name).is_some()
    }

    pub fn widget_rect(&self, name: &str) -> Option<TexelRect> {
        self.index_of(name).map(|i| self.widgets[i].rect)
    }

    pub fn widget_user_data(&self, name: &str) -> Option<&str> {
        self.index_of(name)
            .map(|i| self.widgets[i].spec.user_data.as_str())
    }

    pub fn has_timer(&self, name: &str) -> bool {
        self.timers.iter().any(|t| t.name == name)
    }

    /// Total of all rewards added so far.
    pub fn total_reward(&self) -> f64 {
        self.total_reward
    }

    /// Reward accumulated since the last call; resets the accumulator.
    pub fn take_reward(&mut self) -> f64 {
        std::mem::take(&mut self.pending_reward)
    }

    pub fn add_reward(&mut self, amount: f64) -> Result<(), WidgetError> {
        if !amount.is_finite() {
            return Err(WidgetError::NonFiniteReward(amount));
        }
        self.pending_reward += amount;
        self.total_reward += amount;
        Ok(())
    }

    fn index_of(&self, name: &str) -> Option<usize> {
        self.widgets.iter().position(|w| w.spec.name == name)
    }

    fn texel_rect(&self, w: &Widget<C>) -> Result<TexelRect, WidgetError> {
        const EPS: f64 = 1e-9;
        let (px, py) = w.pos;
        let (sx, sy) = w.size;
        let ok = [px, py, sx, sy]
            .iter()
            .all(|v| v.is_finite() && *v >= -EPS && *v <= 1.0 + EPS)
            && px + sx <= 1.0 + EPS
            && py + sy <= 1.0 + EPS;
        if !ok {
            return Err(WidgetError::OutOfBounds {
                name: w.name.clone(),
                pos: w.pos,
                size: w.size,
            });
        }
        let (sw, sh) = self.screen.dimensions();
        let fw = f64::from(sw);
        let fh = f64::from(sh);
        let cx = |v: f64| ((v * fw).round().clamp(0.0, fw)) as u32;
        let cy = |v: f64| ((v * fh).round().clamp(0.0, fh)) as u32;
        Ok(TexelRect {
            x0: cx(px),
            x1: cx(px + sx),
            y0: cy(1.0 - py - sy),
            y1: cy(1.0 - py),
        })
    }

    pub fn add_widget(&mut self, widget: Widget<C>) -> Result<(), WidgetError> {
        if self.has_widget(&widget.name) {
            return Err(WidgetError::DuplicateName(widget.name));
        }
        let rect = self.texel_rect(&widget)?;
        blit(&mut self.screen, &widget.image, rect, rect);
        self.widgets.push(LiveWidget { spec: widget, rect });
        Ok(())
    }

    /// Remove immediately. If gaze is on the widget its exit callback fires first.
    pub fn remove_widget(&mut self, name: &str, ctx: &mut C) -> Result<Vec<FiredEvent>, WidgetError> {
        let mut fired = Vec::new();
        let mut api = Api::new();
        self.remove_inner(name, ctx, &mut api, &mut fired)?;
        self.finish(api, ctx, &mut fired)?;
        Ok(fired)
    }

    fn remove_inner(
        &mut self,
        name: &str,
        ctx: &mut C,
        api: &mut Api<C>,
        fired: &mut Vec<FiredEvent>,
    ) -> Result<(), WidgetError> {
        let idx = self
            .index_of(name)
            .ok_or_else(|| WidgetError::UnknownWidget(name.to_string()))?;
        let mut live = self.widgets.remove(idx);
        if self.trace.current_widget.as_deref() == Some(name) {
            let ev = GazeEvent {
                widget: name.to_string(),
                point: self.last_point,
                hover_time: self.trace.hover_time,
                user_data: live.spec.user_data.clone(),
            };
            self.trace = GazeEventTrace::default();
            fired.push(FiredEvent::Exit(name.to_string()));
            if let Some(cb) = live.spec.on_exit.as_mut() {
                cb(ctx, api, &ev);
            }
        }
        self.recomposite(live.rect);
        Ok(())
    }

    pub fn set_image(&mut self, name: &str, image: RgbaImage) -> Result<(), WidgetError> {
        let idx = self
            .index_of(name)
            .ok_or_else(|| WidgetError::UnknownWidget(name.to_string()))?;
        self.widgets[idx].spec.image = image;
        let rect = self.widgets[idx].rect;
        self.recomposite(rect);
        Ok(())
    }

    pub fn add_timer(
        &mut self,
        name: impl Into<String>,
        timeout: u64,
        f: impl FnMut(&mut C, &mut Api<C>) + Send + 'static,
    ) -> Result<(), WidgetError> {
        self.add_timer_boxed(name.into(), timeout, Box::new(f))
    }

    fn add_timer_boxed(&mut self, name: String, timeout: u64, callback: TimerCallback<C>) -> Result<(), WidgetError> {
        if self.has_timer(&name) {
            return Err(WidgetError::DuplicateTimer(name));
        }
        self.timers.push(Timer {
            name,
            remaining: timeout,
            callback,
        });
        Ok(())
    }

    pub fn remove_timer(&mut self, name: &str) -> bool {
        let before = self.timers.len();
        self.timers.retain(|t| t.name != name);
        before != self.timers.len()
    }

    /// Remove every widget and timer without firing callbacks, and reset the
    /// gaze trace. Used between episodes.
    pub fn clear(&mut self) {
        self.widgets.clear();
        self.timers.clear();
        self.trace = GazeEventTrace::default();
        self.last_point = None;
        self.pending_reward = 0.0;
        self.total_reward = 0.0;
        let (w, h) = self.screen.dimensions();
        self.screen = RgbImage::from_pixel(w, h, image::Rgb(self.background));
    }

    fn hit_test(&self, p: Option<ScreenPoint>) -> Option<usize> {
        let p = p?;
        self.widgets.iter().rposition(|w| w.rect.contains(p))
    }

    /// Advance one tick: gaze events first (exit before enter), then timers,
    /// then queued structural changes.
    pub fn dispatch_tick(
        &mut self,
        point: Option<ScreenPoint>,
        ctx: &mut C,
    ) -> Result<Vec<FiredEvent>, WidgetError> {
        self.tick += 1;
        self.last_point = point;
        let mut fired = Vec::new();
        let mut api = Api::new();

        let hit = self.hit_test(point);
        let hit_name = hit.map(|i| self.widgets[i].spec.name.clone());
        if hit_name != self.trace.current_widget {
            if let Some(prev) = self.trace.current_widget.take() {
                let hover_time = self.trace.hover_time;
                fired.push(FiredEvent::Exit(prev.clone()));
                if let Some(i) = self.index_of(&prev) {
                    self.call(i, Slot::Exit, point, hover_time, ctx, &mut api);
                }
            }
            self.trace.hover_time = 0;
            if let (Some(i), Some(name)) = (hit, hit_name) {
                self.trace.current_widget = Some(name.clone());
                fired.push(FiredEvent::Enter(name));
                self.call(i, Slot::Enter, point, 0, ctx, &mut api);
            }
        } else if let (Some(i), Some(name)) = (hit, hit_name) {
            self.trace.hover_time += 1;
            let hover_time = self.trace.hover_time;
            fired.push(FiredEvent::Hover {
                widget: name,
                hover_time,
            });
            self.call(i, Slot::Hover, point, hover_time, ctx, &mut api);
        }

        let mut due = Vec::new();
        for t in &mut self.timers {
            t.remaining = t.remaining.saturating_sub(1);
            if t.remaining == 0 {
                due.push(t.name.clone());
            }
        }
        for name in due {
            if let Some(pos) = self.timers.iter().position(|t| t.name == name) {
                let mut t = self.timers.remove(pos);
                fired.push(FiredEvent::Timer(name));
                (t.callback)(ctx, &mut api);
            }
        }

        self.finish(api, ctx, &mut fired)?;
        Ok(fired)
    }

    fn call(
        &mut self,
        idx: usize,
        slot: Slot,
        point: Option<ScreenPoint>,
        hover_time: u64,
        ctx: &mut C,
        api: &mut Api<C>,
    ) {
        let w = &mut self.widgets[idx].spec;
        let cb = match slot {
            Slot::Enter => w.on_enter.as_mut(),
            Slot::Exit => w.on_exit.as_mut(),
            Slot::Hover => w.on_hover.as_mut(),
        };
        if let Some(cb) = cb {
            let ev = GazeEvent {
                widget: w.name.clone(),
                point,
                hover_time,
                user_data: w.user_data.clone(),
            };
            cb(ctx, api, &ev);
        }
    }

    fn finish(&mut self, mut api: Api<C>, ctx: &mut C, fired: &mut Vec<FiredEvent>) -> Result<(), WidgetError> {
        let mut result = Ok(());
        loop {
            self.pending_reward += api.reward;
            self.total_reward += api.reward;
            api.reward = 0.0;
            if api.queue.is_empty() {
                break;
            }
            let queue = std::mem::take(&mut api.queue);
            for cmd in queue {
                let r = match cmd {
                    Command::AddWidget(w) => self.add_widget(w),
                    Command::RemoveWidget(name) => self.remove_inner(&name, ctx, &mut api, fired),
                    Command::SetImage(name, img) => self.set_image(&name, img),
                    Command::AddTimer(name, timeout, cb) => self.add_timer_boxed(name, timeout, cb),
                    Command::RemoveTimer(name) => {
                        self.remove_timer(&name);
                        Ok(())
                    }
                };
                if result.is_ok() {
                    result = r;
                }
            }
        }
        result
    }

    /// Repaint `rect` from the background and every live widget overlapping it.
    fn recomposite(&mut self, rect: TexelRect) {
        let bg = image::Rgb(self.background);
        for y in rect.y0..rect.y1 {
            for x in rect.x0..rect.x1 {
                self.screen.put_pixel(x, y, bg);
            }
        }
        for w in &self.widgets {
            if w.rect.intersects(&rect) {
                blit(&mut self.screen, &w.spec.image, w.rect, rect);
            }
        }
    }

    /// The screen as it would be composited from scratch.
    pub fn composite_from_scratch(&self) -> RgbImage {
        let (w, h) = self.screen.dimensions();
        let mut out = RgbImage::from_pixel(w, h, image::Rgb(self.background));
        let full = TexelRect {
            x0: 0,
            y0: 0,
            x1: w,
            y1: h,
        };
        for lw in &self.widgets {
            blit(&mut out, &lw.spec.image, lw.rect, full);
        }
        out
    }
}

#[derive(Clone, Copy)]
enum Slot {
    Enter,
    Exit,
    Hover,
}

/// Nearest-neighbor scale `img` onto `rect`, restricted to `clip`.
fn blit(screen: &mut RgbImage, img: &RgbaImage, rect: TexelRect, clip: TexelRect) {
    let (iw, ih) = img.dimensions();
    let rw = rect.width();
    let rh = rect.height();
    if rw == 0 || rh == 0 || iw == 0 || ih == 0 {
        return;
    }
    let x0 = rect.x0.max(clip.x0);
    let x1 = rect.x1.min(clip.x1);
    let y0 = rect.y0.max(clip.y0);
    let y1 = rect.y1.min(clip.y1);
    let same = iw == rw && ih == rh;
    for y in y0..y1 {
        let sy = if same {
            y - rect.y0
        } else {
            (((u64::from(y - rect.y0) * 2 + 1) * u64::from(ih)) / (u64::from(rh) * 2)) as u32
        };
        for x in x0..x1 {
            let sx = if same {
                x - rect.x0
            } else {
                (((u64::from(x - rect.x0) * 2 + 1) * u64::from(iw)) / (u64::from(rw) * 2)) as u32
            };
            let src = *img.get_pixel(sx.min(iw - 1), sy.min(ih - 1));
            blend(screen.get_pixel_mut(x, y), src);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::{filled, WHITE};

    #[derive(Default)]
    struct Log {
        events: Vec<String>,
    }

    fn kit() -> WidgetKit<Log> {
        WidgetKit::new(100, 100, [0, 0, 0])
    }

    fn logging(name: &str, pos: (f64, f64), size: (f64, f64)) -> Widget<Log> {
        let n = name.to_string();
        let n2 = n.clone();
        let n3 = n.clone();
        Widget::new(name, filled(4, 4, WHITE), pos, size)
            .on_enter(move |l: &mut Log, _, _| l.events.push(format!("enter:{n}")))
            .on_exit(move |l: &mut Log, _, _| l.events.push(format!("exit:{n2}")))
            .on_hover(move |l: &mut Log, _, e| l.events.push(format!("hover:{n3}:{}", e.hover_time)))
    }

    fn pt(x: f64, y: f64) -> Option<ScreenPoint> {
        Some(ScreenPoint::new(x, y))
    }

    #[test]
    fn full_screen_widget_covers_everything() {
        let mut k = kit();
        k.add_widget(Widget::new("bg", filled(1, 1, WHITE), (0.0, 0.0), (1.0, 1.0)))
            .unwrap();
        assert!(k.screen().pixels().all(|p| p.0 == WHITE));
    }

    #[test]
    fn center_widget_gets_enter_on_next_dispatch() {
        let mut k = kit();
        let mut log = Log::default();
        k.add_widget(logging("cross", (0.45, 0.45), (0.1, 0.1))).unwrap();
        let fired = k.dispatch_tick(pt(50.0, 50.0), &mut log).unwrap();
        assert_eq!(fired, vec![FiredEvent::Enter("cross".into())]);
    }

    #[test]
    fn only_hit_widget_fires() {
        let mut k = kit();
        let mut log = Log::default();
        k.add_widget(logging("a", (0.0, 0.0), (0.4, 0.4))).unwrap();
        k.add_widget(logging("b", (0.6, 0.6), (0.4, 0.4))).unwrap();
        // screen y grows downward; fraction y=0.2 is texel row 80
        k.dispatch_tick(pt(20.0, 80.0), &mut log).unwrap();
        k.dispatch_tick(pt(20.0, 80.0), &mut log).unwrap();
        assert_eq!(log.events, vec!["enter:a", "hover:a:1"]);
    }

    #[test]
    fn exit_before_enter() {
        let mut k = kit();
        let mut log = Log::default();
        k.add_widget(logging("a", (0.0, 0.0), (0.4, 0.4))).unwrap();
        k.add_widget(logging("b", (0.6, 0.6), (0.4, 0.4))).unwrap();
        k.dispatch_tick(pt(20.0, 80.0), &mut log).unwrap();
        let fired = k.dispatch_tick(pt(80.0, 20.0), &mut log).unwrap();
        assert_eq!(
            fired,
            vec![FiredEvent::Exit("a".into()), FiredEvent::Enter("b".into())]
        );
        let fired = k.dispatch_tick(None, &mut log).unwrap();
        assert_eq!(fired, vec![FiredEvent::Exit("b".into())]);
        assert_eq!(k.trace().current_widget, None);
    }

    #[test]
    fn last_added_wins_on_overlap() {
        let mut k = kit();
        let mut log = Log::default();
        k.add_widget(logging("under", (0.0, 0.0), (1.0, 1.0))).unwrap();
        k.add_widget(logging("over", (0.4, 0.4), (0.2, 0.2))).unwrap();
        let fired = k.dispatch_tick(pt(50.0, 50.0), &mut log).unwrap();
        assert_eq!(fired, vec![FiredEvent::Enter("over".into())]);
    }

    #[test]
    fn timer_fires_exactly_after_timeout_ticks() {
        let mut k = kit();
        let mut log = Log::default();
        k.dispatch_tick(None, &mut log).unwrap();
        let t = k.tick_count();
        k.add_timer("t", 3, |l: &mut Log, _| l.events.push("timer".into()))
            .unwrap();
        let mut fired_at = None;
        for _ in 0..6 {
            let ev = k.dispatch_tick(None, &mut log).unwrap();
            if ev.contains(&FiredEvent::Timer("t".into())) {
                assert!(fired_at.is_none());
                fired_at = Some(k.tick_count());
            }
        }
        assert_eq!(fired_at, Some(t + 3));
        assert!(!k.has_timer("t"));
        assert_eq!(log.events, vec!["timer"]);
    }

    #[test]
    fn remove_hovered_widget_fires_exit() {
        let mut k = kit();
        let mut log = Log::default();
        k.add_widget(logging("a", (0.0, 0.0), (1.0, 1.0))).unwrap();
        k.dispatch_tick(pt(5.0, 5.0), &mut log).unwrap();
        let fired = k.remove_widget("a", &mut log).unwrap();
        assert_eq!(fired, vec![FiredEvent::Exit("a".into())]);
        assert_eq!(k.trace().current_widget, None);
        assert!(k.screen().pixels().all(|p| p.0 == [0, 0, 0]));
        // no further callbacks
        k.dispatch_tick(pt(5.0, 5.0), &mut log).unwrap();
        assert_eq!(log.events, vec!["enter:a", "exit:a"]);
    }

    #[test]
    fn remove_then_readd_and_unknown() {
        let mut k = kit();
        let mut log = Log::default();
        k.add_widget(logging("a", (0.0, 0.0), (0.5, 0.5))).unwrap();
        k.remove_widget("a", &mut log).unwrap();
        k.add_widget(logging("a", (0.0, 0.0), (0.5, 0.5))).unwrap();
        assert_eq!(
            k.remove_widget("zzz", &mut log),
            Err(WidgetError::UnknownWidget("zzz".into()))
        );
        assert!(matches!(
            k.add_widget(logging("a", (0.0, 0.0), (0.5, 0.5))),
            Err(WidgetError::DuplicateName(_))
        ));
    }

    #[test]
    fn out_of_bounds_rejected() {
        let mut k = kit();
        let r = k.add_widget(logging("a", (0.7, 0.0), (0.5, 0.5)));
        assert!(matches!(r, Err(WidgetError::OutOfBounds { .. })));
        let r = k.add_widget(logging("b", (-0.1, 0.0), (0.5, 0.5)));
        assert!(matches!(r, Err(WidgetError::OutOfBounds { .. })));
    }

    #[test]
    fn rewards_accumulate_per_step() {
        let mut k = kit();
        let mut log = Log::default();
        assert_eq!(k.take_reward(), 0.0);
        k.add_reward(1.0).unwrap();
        assert_eq!(k.take_reward(), 1.0);
        k.add_reward(1.0).unwrap();
        k.add_reward(1.0).unwrap();
        assert_eq!(k.take_reward(), 2.0);
        assert!(k.add_reward(f64::NAN).is_err());
        k.add_widget(
            Widget::new("r", filled(1, 1, WHITE), (0.0, 0.0), (1.0, 1.0))
                .on_hover(|_: &mut Log, api, _| api.add_reward(0.5).unwrap()),
        )
        .unwrap();
        k.dispatch_tick(pt(1.0, 1.0), &mut log).unwrap();
        k.dispatch_tick(pt(1.0, 1.0), &mut log).unwrap();
        assert_eq!(k.take_reward(), 0.5);
        assert_eq!(k.total_reward(), 3.5);
    }

    #[test]
    fn callback_mutations_are_deferred() {
        let mut k = kit();
        let mut log = Log::default();
        k.add_widget(
            Widget::new("a", filled(1, 1, WHITE), (0.0, 0.0), (1.0, 1.0)).on_enter(
                |_: &mut Log, api: &mut Api<Log>, _| {
                    api.remove_widget("a");
                    api.add_widget(Widget::new("b", filled(1, 1, [9, 9, 9]), (0.0, 0.0), (0.5, 0.5)));
                    api.add_timer("t", 1, |l: &mut Log, _| l.events.push("t".into()));
                },
            ),
        )
        .unwrap();
        let fired = k.dispatch_tick(pt(1.0, 1.0), &mut log).unwrap();
        assert_eq!(
            fired,
            vec![FiredEvent::Enter("a".into()), FiredEvent::Exit("a".into())]
        );
        assert!(!k.has_widget("a"));
        assert!(k.has_widget("b"));
        assert_eq!(k.screen(), &k.composite_from_scratch());
        let fired = k.dispatch_tick(None, &mut log).unwrap();
        assert_eq!(fired, vec![FiredEvent::Timer("t".into())]);
    }

    #[test]
    fn screen_matches_scratch_composite_after_edits() {
        let mut k = kit();
        let mut log = Log::default();
        k.add_widget(Widget::new("a", filled(3, 3, [10, 0, 0]), (0.1, 0.1), (0.5, 0.5))).unwrap();
        k.add_widget(Widget::new("b", filled(3, 3, [0, 20, 0]), (0.3, 0.3), (0.5, 0.5))).unwrap();
        k.add_widget(Widget::new("c", filled(3, 3, [0, 0, 30]), (0.0, 0.5), (0.4, 0.4))).unwrap();
        k.remove_widget("b", &mut log).unwrap();
        k.set_image("a", filled(7, 2, [1, 2, 3])).unwrap();
        assert_eq!(k.screen(), &k.composite_from_scratch());
    }
}
