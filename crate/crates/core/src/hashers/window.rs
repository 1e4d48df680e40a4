/// Ring of the last `capacity` items, stored twice so the live window is
/// always one contiguous slice.
#[derive(Debug, Clone)]
pub(crate) struct Window<T> {
    buf: Vec<T>,
    capacity: usize,
    /// Slot that the next push writes.
    next: usize,
    len: usize,
}

impl<T: Copy + Default> Window<T> {
    pub(crate) fn new(capacity: usize) -> Self {
        assert!(capacity > 0);
        Self {
            buf: vec![T::default(); 2 * capacity],
            capacity,
            next: 0,
            len: 0,
        }
    }

    /// Appends `item`, returning the evicted oldest item once full.
    #[inline]
    pub(crate) fn push(&mut self, item: T) -> Option<T> {
        let evicted = (self.len == self.capacity).then(|| self.buf[self.next]);
        self.buf[self.next] = item;
        self.buf[self.next + self.capacity] = item;
        self.next += 1;
        if self.next == self.capacity {
            self.next = 0;
        }
        if self.len < self.capacity {
            self.len += 1;
        }
        evicted
    }

    /// Items oldest first.
    #[inline]
    pub(crate) fn as_slice(&self) -> &[T] {
        if self.len < self.capacity {
            &self.buf[..self.len]
        } else {
            &self.buf[self.next..self.next + self.capacity]
        }
    }

    /// The item `back` positions before the newest (0 = newest).
    #[inline]
    pub(crate) fn back(&self, back: usize) -> T {
        debug_assert!(back < self.len);
        let idx = (self.next + self.capacity - 1 - back) % self.capacity;
        self.buf[idx]
    }

    #[inline]
    pub(crate) fn is_full(&self) -> bool {
        self.len == self.capacity
    }

    #[inline]
    pub(crate) fn len(&self) -> usize {
        self.len
    }

    pub(crate) fn clear(&mut self) {
        self.next = 0;
        self.len = 0;
    }
}
