// Video/timeline synchronization. The playhead lives in session time; each
// camera's video runs at session time minus its manifest offset, so seeks
// and camera switches are pure offset arithmetic.

export interface VideoLike {
  currentTime: number;
  addEventListener(type: string, listener: () => void): void;
  removeEventListener(type: string, listener: () => void): void;
}

export function videoTimeForPlayhead(playhead: number, cameraOffset: number): number {
  return Math.max(0, playhead - cameraOffset);
}

export function playheadForVideoTime(videoTime: number, cameraOffset: number): number {
  return videoTime + cameraOffset;
}

export class VideoSync {
  private offset = 0;
  private suppress = false;
  private readonly onTimeUpdate: () => void;

  constructor(
    private video: VideoLike,
    private emitPlayhead: (t: number) => void,
  ) {
    this.onTimeUpdate = () => {
      if (this.suppress) return;
      this.emitPlayhead(playheadForVideoTime(this.video.currentTime, this.offset));
    };
    video.addEventListener("timeupdate", this.onTimeUpdate);
  }

  setOffset(offset: number): void {
    this.offset = offset;
  }

  /** Timeline-driven seek: move the video without echoing a playhead event. */
  seekPlayhead(playhead: number): void {
    this.suppress = true;
    this.video.currentTime = videoTimeForPlayhead(playhead, this.offset);
    this.suppress = false;
  }

  /** Switch cameras, preserving the session-time playhead under the new offset. */
  switchCamera(newOffset: number, playhead: number): void {
    this.offset = newOffset;
    this.seekPlayhead(playhead);
  }

  /** |session time implied by the video - playhead|, for sync checks. */
  divergence(playhead: number): number {
    return Math.abs(playheadForVideoTime(this.video.currentTime, this.offset) - playhead);
  }

  dispose(): void {
    this.video.removeEventListener("timeupdate", this.onTimeUpdate);
  }
}
