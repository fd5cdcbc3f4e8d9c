# Package marker.